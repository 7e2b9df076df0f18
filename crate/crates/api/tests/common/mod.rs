#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use taas_api::{router, AppState, Config, HashCost};
use taas_core::review::PaperRecord;
use taas_core::store::{DocumentStore, MemoryStore};
use taas_core::{ConceptKind, PaperId, Provenance, RelationType, TaxonomyId};
use tower::ServiceExt;

pub const CHEAP: HashCost = HashCost {
    memory_kib: 256,
    iterations: 1,
};

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.text))
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(name).and_then(|v| v.to_str().ok())
    }
}

pub struct TestApp {
    pub state: AppState,
    pub app: Router,
}

impl TestApp {
    pub fn new() -> Self {
        Self::with_ttl(3600)
    }

    pub fn with_ttl(token_ttl_secs: u64) -> Self {
        Self::on_store(Arc::new(MemoryStore::new()), token_ttl_secs)
    }

    pub fn on_store(store: Arc<dyn DocumentStore>, token_ttl_secs: u64) -> Self {
        let config = Config {
            token_ttl_secs,
            password_hash: CHEAP,
            ..Config::default()
        };
        let state = AppState::new(store, &config).expect("state");
        Self {
            app: router(state.clone()),
            state,
        }
    }

    pub async fn send(&self, method: Method, uri: &str, token: Option<&str>, body: Option<&str>) -> Reply {
        self.send_with(method, uri, token, body, &[]).await
    }

    pub async fn send_with(
        &self,
        method: Method,
        uri: &str,
        token: Option<&str>,
        body: Option<&str>,
        headers: &[(&str, &str)],
    ) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(token) = token {
            req = req.header("authorization", format!("Bearer {token}"));
        }
        if body.is_some() {
            req = req.header("content-type", "application/json");
        }
        for (k, v) in headers {
            req = req.header(*k, *v);
        }
        let req = req
            .body(body.map_or_else(Body::empty, |b| Body::from(b.to_owned())))
            .unwrap();
        let res = self.app.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let headers = res.headers().clone();
        let bytes = res.into_body().collect().await.unwrap().to_bytes();
        Reply {
            status,
            headers,
            text: String::from_utf8_lossy(&bytes).into_owned(),
        }
    }

    pub async fn get(&self, uri: &str, token: Option<&str>) -> Reply {
        self.send(Method::GET, uri, token, None).await
    }

    pub async fn post(&self, uri: &str, token: Option<&str>, body: &str) -> Reply {
        self.send(Method::POST, uri, token, Some(body)).await
    }

    /// Registers and logs in a user, returning the bearer token.
    pub async fn login(&self, email: &str) -> String {
        let creds = format!(r#"{{"email":"{email}","password":"correct horse"}}"#);
        let r = self.post("/api/v1/auth/register", None, &creds).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
        let r = self.post("/api/v1/auth/login", None, &creds).await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text);
        r.json()["token"].as_str().unwrap().to_owned()
    }

    /// Stores every taxonomy document, keyed by id.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.state
            .workspace
            .list()
            .into_iter()
            .map(|t| (t.id().to_string(), self.state.workspace.export(t.id()).unwrap()))
            .collect()
    }
}

/// Ids of a seeded taxonomy with one of everything.
#[derive(Clone, Debug)]
pub struct Seeded {
    pub tid: String,
    pub did: String,
    pub cid: String,
    pub other_cid: String,
    pub rid: String,
    pub pid: String,
    pub term: String,
    pub keyword: String,
}

impl Seeded {
    /// Full request URI for a route-table path, with any query a route needs.
    pub fn uri(&self, path: &str) -> String {
        let mut uri = format!("{}{}", taas_api::API_PREFIX, self.fill(path));
        if path.ends_with("/matrix/cell") {
            uri.push_str(&format!("?a={}&b={}", self.cid, self.other_cid));
        }
        uri
    }

    pub fn fill(&self, path: &str) -> String {
        path.replace("{tid}", &self.tid)
            .replace("{did}", &self.did)
            .replace("{cid}", &self.cid)
            .replace("{rid}", &self.rid)
            .replace("{pid}", &self.pid)
            .replace("{term}", &self.term)
            .replace("{keyword}", &self.keyword)
    }
}

pub fn seed(state: &AppState, name: &str, public: bool) -> Seeded {
    let tax = state.workspace.create(name).unwrap();
    let tid: TaxonomyId = tax.id().clone();
    let (seeded, _) = state
        .workspace
        .mutate(&tid, None, |t| {
            t.set_public(public);
            let did = t.add_dimension("Attack", "")?;
            let root = t.add_concept(&did, "Fault Injection", ConceptKind::Major)?;
            let leaf = t.add_concept(&did, "Voltage Glitching", ConceptKind::Node)?;
            let rid = t.add_relation(&leaf, &root, RelationType::Inheritance, "")?;
            t.add_synonym(&leaf, "glitch")?;
            let outcome = t.import_papers(vec![PaperRecord {
                id: Some("p1".into()),
                title: Some("Glitching a secure element".into()),
                abstract_text: "voltage glitching against fault injection countermeasures".into(),
                year: Some(2020),
                citation_count: 7,
                ..PaperRecord::default()
            }]);
            let pid: PaperId = outcome.created[0].clone();
            t.tag_paper(&pid, "hardware", "")?;
            t.map_paper(&pid, &leaf, Provenance::Manual, 0)?;
            Ok(Seeded {
                tid: tid.to_string(),
                did: did.to_string(),
                cid: leaf.to_string(),
                other_cid: root.to_string(),
                rid: rid.to_string(),
                pid: pid.to_string(),
                term: "glitch".into(),
                keyword: "hardware".into(),
            })
        })
        .unwrap();
    seeded
}
