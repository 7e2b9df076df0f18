//! Walks the whole route table and checks what anonymous, forged, expired
//! and valid callers can do on each route.

mod common;

use axum::http::{Method, StatusCode};
use common::{seed, TestApp};
use taas_api::{route_table, Access, API_PREFIX};

const FORGED: &str = "00000000000000000000000000000000000000000000000000000000deadbeef";

fn body_for(method: &Method) -> Option<&'static str> {
    matches!(*method, Method::POST | Method::PUT | Method::PATCH).then_some("{}")
}

#[tokio::test]
async fn anonymous_and_forged_callers_are_stopped() {
    let app = TestApp::new();
    let private = seed(&app.state, "Private", false);
    let public = seed(&app.state, "Public", true);
    let before = app.snapshot();

    for route in route_table() {
        for (label, ids) in [("private", &private), ("public", &public)] {
            let uri = ids.uri(route.path);
            let body = body_for(&route.method);
            let anon = app.send(route.method.clone(), &uri, None, body).await;
            let forged = app.send(route.method.clone(), &uri, Some(FORGED), body).await;
            let scoped = route.path.contains("{tid}");
            match route.access {
                Access::Open => {
                    assert_ne!(anon.status, StatusCode::UNAUTHORIZED, "{} {uri}", route.method);
                    assert_ne!(forged.status, StatusCode::UNAUTHORIZED, "{} {uri}", route.method);
                }
                Access::PublicRead => {
                    if scoped && label == "private" {
                        assert_eq!(anon.status, StatusCode::UNAUTHORIZED, "{} {uri}", route.method);
                    } else {
                        assert!(anon.status.is_success(), "{} {uri}: {}", route.method, anon.text);
                    }
                    assert_eq!(forged.status, StatusCode::UNAUTHORIZED, "{} {uri}", route.method);
                }
                Access::GuardedRead | Access::Mutating => {
                    assert_eq!(anon.status, StatusCode::UNAUTHORIZED, "{} {uri}", route.method);
                    assert_eq!(forged.status, StatusCode::UNAUTHORIZED, "{} {uri}", route.method);
                }
            }
            if anon.status == StatusCode::UNAUTHORIZED {
                let err = anon.json();
                assert!(err["code"].is_string() && err["message"].is_string(), "{uri}: {}", anon.text);
            }
        }
    }
    assert_eq!(app.snapshot(), before, "rejected requests changed state");
}

#[tokio::test]
async fn expired_tokens_are_rejected() {
    let app = TestApp::with_ttl(0);
    let ids = seed(&app.state, "Public", true);
    let token = app.login("late@example.org").await;
    let before = app.snapshot();
    for route in route_table() {
        if route.access == Access::Open {
            continue;
        }
        let uri = ids.uri(route.path);
        let r = app
            .send(route.method.clone(), &uri, Some(&token), body_for(&route.method))
            .await;
        assert_eq!(r.status, StatusCode::UNAUTHORIZED, "{} {uri}", route.method);
    }
    assert_eq!(app.snapshot(), before);
}

#[tokio::test]
async fn valid_tokens_pass_the_guard_on_every_route() {
    for route in route_table() {
        let app = TestApp::new();
        let ids = seed(&app.state, "Private", false);
        let token = app.login("editor@example.org").await;
        let uri = ids.uri(route.path);
        let r = app
            .send(route.method.clone(), &uri, Some(&token), body_for(&route.method))
            .await;
        if route.path == "/auth/login" {
            // The body has no credentials, so this is a credential failure
            // rather than a guard rejection.
            assert_eq!(r.status, StatusCode::BAD_REQUEST, "{}", r.text);
            continue;
        }
        assert_ne!(r.status, StatusCode::UNAUTHORIZED, "{} {uri}: {}", route.method, r.text);
        assert_ne!(r.status, StatusCode::NOT_FOUND, "{} {uri}: {}", route.method, r.text);
        assert_ne!(r.status, StatusCode::METHOD_NOT_ALLOWED, "{} {uri}", route.method);
        assert!(!r.status.is_server_error(), "{} {uri}: {}", route.method, r.text);
    }
}

#[tokio::test]
async fn malformed_authorization_header_is_rejected() {
    let app = TestApp::new();
    let ids = seed(&app.state, "Public", true);
    let uri = format!("{API_PREFIX}/taxonomies/{}", ids.tid);
    let r = app
        .send_with(Method::GET, &uri, None, None, &[("authorization", "Basic Zm9vOmJhcg==")])
        .await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn login_failures_look_the_same() {
    let app = TestApp::new();
    app.login("known@example.org").await;
    let wrong = app
        .post(
            "/api/v1/auth/login",
            None,
            r#"{"email":"known@example.org","password":"not the one"}"#,
        )
        .await;
    let unknown = app
        .post(
            "/api/v1/auth/login",
            None,
            r#"{"email":"nobody@example.org","password":"not the one"}"#,
        )
        .await;
    assert_eq!(wrong.status, StatusCode::UNAUTHORIZED);
    assert_eq!(wrong.status, unknown.status);
    assert_eq!(wrong.text, unknown.text);
}

#[tokio::test]
async fn logout_revokes_the_token() {
    let app = TestApp::new();
    let token = app.login("leaving@example.org").await;
    assert_eq!(app.get("/api/v1/auth/me", Some(&token)).await.status, StatusCode::OK);
    let r = app.send(Method::POST, "/api/v1/auth/logout", Some(&token), None).await;
    assert_eq!(r.status, StatusCode::NO_CONTENT);
    assert_eq!(
        app.get("/api/v1/auth/me", Some(&token)).await.status,
        StatusCode::UNAUTHORIZED
    );
}

#[tokio::test]
async fn anonymous_listing_shows_only_public_taxonomies() {
    let app = TestApp::new();
    seed(&app.state, "Hidden", false);
    let shown = seed(&app.state, "Shown", true);
    let list = app.get("/api/v1/taxonomies", None).await.json();
    let ids: Vec<_> = list.as_array().unwrap().iter().map(|h| h["id"].as_str().unwrap()).collect();
    assert_eq!(ids, vec![shown.tid.as_str()]);
    let token = app.login("member@example.org").await;
    let list = app.get("/api/v1/taxonomies", Some(&token)).await.json();
    assert_eq!(list.as_array().unwrap().len(), 2);
}
