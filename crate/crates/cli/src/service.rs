use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde_json::Value;

use crate::advantages::{advantage_items, parse_row};
use crate::eval::evaluate_lines;
use crate::schema::{join_array, Rendered};
use crate::score::{score_pending, IdTracker};
use crate::ScoringContext;

fn json(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn bad_request(error: impl std::fmt::Display) -> Response {
    json(StatusCode::BAD_REQUEST, serde_json::json!({ "error": error.to_string() }).to_string())
}

fn items_response(items: &[Rendered]) -> Response {
    let status = if items.iter().any(|i| i.failed) { StatusCode::UNPROCESSABLE_ENTITY } else { StatusCode::OK };
    json(status, join_array(items))
}

/// Body must be a JSON array; each element is re-encoded as one batch line.
fn array_lines(body: &[u8]) -> Result<Vec<String>, String> {
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Array(items)) => Ok(items.iter().map(Value::to_string).collect()),
        Ok(_) => Err("request body must be a JSON array".into()),
        Err(e) => Err(format!("invalid JSON body: {e}")),
    }
}

async fn blocking<F>(f: F) -> Response
where
    F: FnOnce() -> Response + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r,
        Err(e) => json(StatusCode::INTERNAL_SERVER_ERROR, serde_json::json!({ "error": e.to_string() }).to_string()),
    }
}

async fn health() -> Response {
    json(StatusCode::OK, serde_json::json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }).to_string())
}

async fn score(State(ctx): State<Arc<ScoringContext>>, body: Bytes) -> Response {
    let lines = match array_lines(&body) {
        Ok(l) => l,
        Err(e) => return bad_request(e),
    };
    blocking(move || {
        let mut ids = IdTracker::default();
        let pending = lines.iter().map(|l| ids.admit_line(l)).collect();
        items_response(&score_pending(&ctx, pending))
    })
    .await
}

async fn advantages(State(ctx): State<Arc<ScoringContext>>, body: Bytes) -> Response {
    let lines = match array_lines(&body) {
        Ok(l) => l,
        Err(e) => return bad_request(e),
    };
    let rows = lines.iter().map(|l| parse_row(l)).collect();
    items_response(&advantage_items(rows, &ctx.grpo))
}

async fn eval(
    State(ctx): State<Arc<ScoringContext>>,
    Query(params): Query<HashMap<String, String>>,
    body: Bytes,
) -> Response {
    let lines = match array_lines(&body) {
        Ok(l) => l,
        Err(e) => return bad_request(e),
    };
    blocking(move || {
        let group_by = params.get("group_by").map(String::as_str);
        let (report, failures) = evaluate_lines(lines.iter().map(String::as_str), &ctx.lexicon, group_by);
        match report {
            None => bad_request("no samples to evaluate"),
            Some(_) if !failures.is_empty() => items_response(&failures),
            Some(r) => json(StatusCode::OK, serde_json::to_string(&r).expect("report serializes")),
        }
    })
    .await
}

pub fn router(ctx: Arc<ScoringContext>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/score", post(score))
        .route("/advantages", post(advantages))
        .route("/eval", post(eval))
        .with_state(ctx)
}

/// Serves until ctrl-c.
pub async fn serve(ctx: Arc<ScoringContext>, bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(ctx))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ScoringSettings;
    use axum::body::Body;
    use axum::http::Request;
    use http_body_util::BodyExt;
    use tower::ServiceExt;

    async fn call(method: &str, uri: &str, body: &str) -> (StatusCode, String) {
        let app = router(Arc::new(ScoringSettings::default().build().unwrap()));
        let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
        let resp = app.oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    #[tokio::test]
    async fn health_ok() {
        let (s, b) = call("GET", "/health", "").await;
        assert_eq!(s, StatusCode::OK);
        let v: Value = serde_json::from_str(&b).unwrap();
        assert_eq!(v["status"], "ok");
    }

    #[tokio::test]
    async fn schema_violations_are_400() {
        assert_eq!(call("POST", "/score", "{").await.0, StatusCode::BAD_REQUEST);
        assert_eq!(call("POST", "/score", "{\"id\":1}").await.0, StatusCode::BAD_REQUEST);
        assert_eq!(call("POST", "/eval", "[]").await.0, StatusCode::BAD_REQUEST);
    }

    #[tokio::test]
    async fn score_items() {
        let ok = r#"[{"id":"a","trace":"<answer>[\"sad\"]</answer>","gt_labels":["sad"]}]"#;
        let (s, b) = call("POST", "/score", ok).await;
        assert_eq!(s, StatusCode::OK);
        assert!(b.starts_with("[{\"id\":\"a\""));
        let dup = r#"[{"id":"a","trace":"","gt_labels":["sad"]},{"id":"a","trace":"","gt_labels":["sad"]}]"#;
        let (s, b) = call("POST", "/score", dup).await;
        assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
        assert!(b.contains("duplicate"));
    }

    #[tokio::test]
    async fn singleton_group_is_422() {
        let (s, b) = call("POST", "/advantages", r#"[{"group_id":"g7","id":"a","reward":1}]"#).await;
        assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
        assert!(b.contains("group g7"));
    }

    #[tokio::test]
    async fn eval_groups() {
        let body = r#"[{"pred":["sad"],"gt":["sad"],"c":"HCS"},{"pred":["happy"],"gt":["sad"],"c":"LCS"}]"#;
        let (s, b) = call("POST", "/eval?group_by=c", body).await;
        assert_eq!(s, StatusCode::OK);
        let v: Value = serde_json::from_str(&b).unwrap();
        assert_eq!(v["groups"]["HCS"]["s1"], 100.0);
        assert_eq!(v["samples"], 2);
    }
}
