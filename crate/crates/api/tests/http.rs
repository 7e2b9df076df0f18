mod common;

use axum::http::{Method, StatusCode};
use common::{seed, TestApp};
use serde_json::{json, Value};

async fn create(app: &TestApp, token: &str, name: &str) -> String {
    let r = app
        .post("/api/v1/taxonomies", Some(token), &json!({ "name": name }).to_string())
        .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
    r.json()["taxonomy"]["id"].as_str().unwrap().to_owned()
}

async fn mutate(app: &TestApp, token: &str, method: Method, uri: &str, body: Value) -> Value {
    let r = app.send(method, uri, Some(token), Some(&body.to_string())).await;
    assert!(r.status.is_success(), "{uri}: {} {}", r.status, r.text);
    let v = r.json();
    assert_eq!(
        r.header("x-taxonomy-version").unwrap(),
        v["version"].to_string(),
        "version header and body disagree"
    );
    v
}

#[tokio::test]
async fn editing_workflow_bumps_versions_and_detects_conflicts() {
    let app = TestApp::new();
    let token = app.login("ed@example.org").await;
    let tid = create(&app, &token, "Hardware attacks").await;
    let base = format!("/api/v1/taxonomies/{tid}");

    let dim = mutate(&app, &token, Method::POST, &format!("{base}/dimensions"), json!({ "name": "Attack" })).await;
    assert_eq!(dim["version"], 2);
    let did = dim["data"]["id"].as_str().unwrap().to_owned();
    let root = mutate(
        &app,
        &token,
        Method::POST,
        &format!("{base}/concepts"),
        json!({ "dimension_id": did, "name": "Side Channel", "kind": "major" }),
    )
    .await;
    let root_id = root["data"]["id"].as_str().unwrap().to_owned();
    let leaf = mutate(
        &app,
        &token,
        Method::POST,
        &format!("{base}/concepts"),
        json!({ "dimension_id": did, "name": "Power Analysis" }),
    )
    .await;
    let leaf_id = leaf["data"]["id"].as_str().unwrap().to_owned();
    assert_eq!(leaf["version"], 4);

    // Duplicate names are rejected without a version bump.
    let r = app
        .post(
            &format!("{base}/concepts"),
            Some(&token),
            &json!({ "dimension_id": did, "name": "power analysis" }).to_string(),
        )
        .await;
    assert_eq!(r.status, StatusCode::CONFLICT, "{}", r.text);
    assert_eq!(r.json()["code"], "duplicate_name");

    let rel = mutate(
        &app,
        &token,
        Method::POST,
        &format!("{base}/relations"),
        json!({ "source_id": leaf_id, "target_id": root_id, "rel_type": "inheritance" }),
    )
    .await;
    assert_eq!(rel["version"], 5);
    let back = app
        .post(
            &format!("{base}/relations"),
            Some(&token),
            &json!({ "source_id": root_id, "target_id": leaf_id, "rel_type": "composition" }).to_string(),
        )
        .await;
    assert_eq!(back.status, StatusCode::UNPROCESSABLE_ENTITY, "{}", back.text);

    let hierarchy = app.get(&format!("{base}/hierarchy"), Some(&token)).await;
    assert_eq!(hierarchy.status, StatusCode::OK);

    // Optimistic concurrency.
    let stale = app
        .send_with(
            Method::PATCH,
            &base,
            Some(&token),
            Some(r#"{"name":"Renamed"}"#),
            &[("x-taxonomy-version", "3")],
        )
        .await;
    assert_eq!(stale.status, StatusCode::CONFLICT);
    assert_eq!(stale.json()["code"], "version_conflict");
    let fresh = app
        .send_with(
            Method::PATCH,
            &base,
            Some(&token),
            Some(r#"{"name":"Renamed"}"#),
            &[("x-taxonomy-version", "5")],
        )
        .await;
    assert_eq!(fresh.status, StatusCode::OK, "{}", fresh.text);
    assert_eq!(fresh.json()["version"], 6);

    let doc = app.get(&base, Some(&token)).await.json();
    assert_eq!(doc["taxonomy"]["name"], "Renamed");
    assert_eq!(doc["concepts"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn review_matching_and_views() {
    let app = TestApp::new();
    let token = app.login("rev@example.org").await;
    let ids = seed(&app.state, "Review", false);
    let base = format!("/api/v1/taxonomies/{}", ids.tid);

    let imported = mutate(
        &app,
        &token,
        Method::POST,
        &format!("{base}/papers"),
        json!([
            { "id": "p2", "title": "Fault injection on voltage glitching targets", "year": 2021, "citation_count": 3 },
            { "title": "" }
        ]),
    )
    .await;
    assert_eq!(imported["data"]["created"], json!(["p2"]));
    assert_eq!(imported["data"]["rejected"].as_array().unwrap().len(), 1);

    let voted = mutate(
        &app,
        &token,
        Method::PUT,
        &format!("{base}/papers/p2/vote"),
        json!({ "value": "include" }),
    )
    .await;
    assert_eq!(voted["data"]["positive_votes"], 1);
    let listed = app.get(&format!("{base}/papers?min_votes=1"), Some(&token)).await.json();
    assert_eq!(listed.as_array().unwrap().len(), 1);

    let suggest = app
        .post(
            &format!("{base}/match/suggest"),
            Some(&token),
            r#"{"method":"levenshtein","moc":1}"#,
        )
        .await;
    assert_eq!(suggest.status, StatusCode::OK, "{}", suggest.text);
    let suggestions = suggest.json()["suggestions"].as_array().unwrap().clone();
    assert!(suggestions
        .iter()
        .any(|s| s["suggestion"]["paper_id"] == "p2" && s["new"] == true));
    let applied = mutate(
        &app,
        &token,
        Method::POST,
        &format!("{base}/match/apply"),
        json!({ "method": "levenshtein", "moc": 1, "paper_ids": ["p2"] }),
    )
    .await;
    assert!(applied["data"]["changed"].as_u64().unwrap() >= 1);

    let m1 = app.get(&format!("{base}/matrix"), Some(&token)).await;
    assert_eq!(m1.status, StatusCode::OK);
    assert_eq!(m1.header("x-cache"), Some("miss"));
    let m2 = app.get(&format!("{base}/matrix"), Some(&token)).await;
    assert_eq!(m2.header("x-cache"), Some("hit"));
    assert_eq!(m1.text, m2.text);
    let matrix = m1.json();
    let labels = matrix["labels"].as_array().unwrap();
    let cells = matrix["cells"].as_array().unwrap();
    for (i, row) in cells.iter().enumerate() {
        for (j, v) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(v, &cells[j][i], "matrix not symmetric");
        }
    }
    assert_eq!(labels.len(), cells.len());

    let csv = app
        .send_with(Method::GET, &format!("{base}/matrix"), Some(&token), None, &[("accept", "text/csv")])
        .await;
    assert!(csv.header("content-type").unwrap().starts_with("text/csv"));
    assert_eq!(csv.text.lines().count(), labels.len() + 1);

    let cell = app
        .get(&format!("{base}/matrix/cell?a={}&b={}", ids.cid, ids.other_cid), Some(&token))
        .await
        .json();
    assert_eq!(cell.as_array().unwrap().len(), 2);

    let surface = app.get(&format!("{base}/surface?property=citation_sum"), Some(&token)).await;
    assert_eq!(surface.status, StatusCode::OK, "{}", surface.text);
    let bad = app.get(&format!("{base}/surface?property=bogus"), Some(&token)).await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);

    let circles = app.get(&format!("{base}/cropcircles"), Some(&token)).await;
    assert_eq!(circles.status, StatusCode::OK);
    assert_eq!(circles.json()["circles"].as_array().unwrap().len(), 2);

    let coverage = app.get(&format!("{base}/coverage?format=csv"), Some(&token)).await;
    assert!(coverage.text.starts_with("concept_id,concept,paper_count,depth,gap"));

    // Any edit moves the version, and the next view is rebuilt.
    mutate(
        &app,
        &token,
        Method::POST,
        &format!("{base}/papers/p2/tags"),
        json!({ "keyword": "fpga" }),
    )
    .await;
    let m3 = app.get(&format!("{base}/matrix"), Some(&token)).await;
    assert_eq!(m3.header("x-cache"), Some("miss"));
}

#[tokio::test]
async fn fork_merge_and_export_round_trip() {
    let app = TestApp::new();
    let token = app.login("fork@example.org").await;
    let ids = seed(&app.state, "Origin", false);
    let base = format!("/api/v1/taxonomies/{}", ids.tid);

    let fork = app.send(Method::POST, &format!("{base}/fork"), Some(&token), None).await;
    assert_eq!(fork.status, StatusCode::CREATED, "{}", fork.text);
    let fork_doc = fork.json();
    let fork_id = fork_doc["id"].as_str().unwrap().to_owned();
    assert_eq!(fork_doc["name"], "Origin (fork)");
    let forked = app.get(&format!("/api/v1/taxonomies/{fork_id}"), Some(&token)).await.json();
    let fork_did = forked["dimensions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|d| d["name"] == "Attack")
        .unwrap()["id"]
        .clone();
    mutate(
        &app,
        &token,
        Method::POST,
        &format!("/api/v1/taxonomies/{fork_id}/concepts"),
        json!({ "dimension_id": fork_did, "name": "Laser Injection" }),
    )
    .await;
    let merged = mutate(
        &app,
        &token,
        Method::POST,
        &format!("{base}/merge"),
        json!({ "fork_id": fork_id }),
    )
    .await;
    assert_eq!(merged["data"]["added_concepts"], json!([["Attack", "Laser Injection"]]), "{merged}");

    let exported = app.get(&format!("{base}/export"), Some(&token)).await;
    assert_eq!(exported.status, StatusCode::OK);
    let r = app.delete_then_import(&token, &base, &exported.text).await;
    assert_eq!(r["id"].as_str().unwrap(), ids.tid);
    let again = app.get(&format!("{base}/export"), Some(&token)).await;
    assert_eq!(again.json(), exported.json());
}

impl TestApp {
    async fn delete_then_import(&self, token: &str, base: &str, doc: &str) -> Value {
        let r = self.send(Method::DELETE, base, Some(token), None).await;
        assert!(r.status.is_success(), "{}", r.text);
        assert_eq!(self.get(base, Some(token)).await.status, StatusCode::NOT_FOUND);
        let r = self.post("/api/v1/taxonomies/import", Some(token), doc).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
        r.json()
    }
}

#[tokio::test]
async fn unknown_routes_and_bad_bodies_use_the_error_format() {
    let app = TestApp::new();
    let r = app.get("/api/v1/nothing-here", None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert!(r.json()["code"].is_string());
    let r = app.post("/api/v1/auth/register", None, "{not json").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "invalid_body");
    let r = app
        .post("/api/v1/auth/register", None, r#"{"email":"x@example.org","password":"short"}"#)
        .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["details"]["field"], "password");
}

#[tokio::test]
async fn experiments_run_over_http() {
    let app = TestApp::new();
    let token = app.login("lab@example.org").await;
    let ids = seed(&app.state, "Lab", false);
    let r = app
        .post(
            "/api/v1/experiments/conformity?format=csv",
            Some(&token),
            &json!({
                "taxonomy_id": ids.tid,
                "baseline": [{ "paper_id": ids.pid, "concept_id": ids.cid }],
                "moc_values": [1]
            })
            .to_string(),
        )
        .await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text);
    assert_eq!(r.text.lines().count(), 5);
    let empty = app
        .post(
            "/api/v1/experiments/conformity",
            Some(&token),
            &json!({ "taxonomy_id": ids.tid, "baseline": [] }).to_string(),
        )
        .await;
    assert_eq!(empty.status, StatusCode::UNPROCESSABLE_ENTITY);

    let bench = app
        .post(
            "/api/v1/experiments/benchmark",
            Some(&token),
            r#"{"sizes":[5,10],"repetitions":2,"seed":1}"#,
        )
        .await;
    assert_eq!(bench.status, StatusCode::OK, "{}", bench.text);
    assert_eq!(bench.json()["rows"].as_array().unwrap().len(), 2);
}
