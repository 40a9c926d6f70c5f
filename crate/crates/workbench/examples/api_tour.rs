//! Drives the HTTP API in-process: parse, look up a word, build a tree by
//! hand and export it.

use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use ltag::workbench::Workspace;
use ltag_workbench::api::{router, AppState};

async fn send(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> String {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    format!("{status} {}", String::from_utf8_lossy(&bytes))
}

#[tokio::main(flavor = "current_thread")]
async fn main() {
    let app = router(AppState::new(Workspace::sample()));
    let steps = [
        (Method::POST, "/parse", Some(json!({"sentence": "Mary doesn't sleep"}))),
        (Method::GET, "/db/morph/entries?word=does", None),
        (Method::POST, "/workspace/scratch", Some(json!({"name": "s", "tree": "alpha_nx0V", "lexemes": ["runs"]}))),
        (
            Method::POST,
            "/workspace/combine",
            Some(json!({"target": "s", "address": "1", "op": "substitution",
                        "source": {"tree": {"name": "alpha_NP", "lexemes": ["Sue"]}}})),
        ),
        (Method::GET, "/export/s?format=bracketed", None),
    ];
    for (method, uri, body) in steps {
        println!("{method} {uri}\n  {}\n", send(&app, method.clone(), uri, body).await);
    }
}
