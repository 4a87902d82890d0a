use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use dbpareto_cli::router;
use dbpareto_core::Engine;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn engine() -> Arc<Engine> {
    static ENGINE: OnceLock<Arc<Engine>> = OnceLock::new();
    ENGINE.get_or_init(|| Arc::new(Engine::builtin())).clone()
}

async fn call(method: Method, uri: &str, body: Option<&str>) -> (StatusCode, String, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header(header::CONTENT_TYPE, "application/json");
    }
    let req = req
        .body(
            body.map(|b| Body::from(b.to_string()))
                .unwrap_or_else(Body::empty),
        )
        .unwrap();
    let resp = router(engine()).oneshot(req).await.unwrap();
    let status = resp.status();
    let ctype = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, ctype, bytes)
}

async fn json_call(method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let text = body.map(|b| b.to_string());
    let (status, _, bytes) = call(method, uri, text.as_deref()).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn protocols_carry_provenance() {
    let (status, v) = json_call(Method::GET, "/api/protocols", None).await;
    assert_eq!(status, StatusCode::OK);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 13);
    let ka = list.iter().find(|p| p["id"] == "KA").unwrap();
    assert_eq!(ka["grid_size"], 5376);
    assert_eq!(ka["provenance"]["mafia"]["provenance"], "cited-reference");
    assert_eq!(ka["provenance"]["mafia"]["reference"], "KA2011");
    let rc = list.iter().find(|p| p["id"] == "RC").unwrap();
    assert_eq!(rc["e_estimated"], true);
}

#[tokio::test]
async fn instance_pages() {
    let (status, v) = json_call(
        Method::GET,
        "/api/instances?protocol=BC&offset=250&limit=10",
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["total"], 256);
    assert_eq!(v["items"].as_array().unwrap().len(), 6);
    assert_eq!(v["items"][0]["id"], "BC-{251}");

    let (_, v) = json_call(Method::GET, "/api/instances", None).await;
    assert_eq!(v["total"], 29184);
    assert_eq!(v["limit"], 100);

    for (uri, code) in [
        ("/api/instances?limit=0", StatusCode::BAD_REQUEST),
        ("/api/instances?limit=5000", StatusCode::BAD_REQUEST),
        ("/api/instances?offset=abc", StatusCode::BAD_REQUEST),
        ("/api/instances?colour=red", StatusCode::BAD_REQUEST),
        ("/api/instances?protocol=Nope", StatusCode::NOT_FOUND),
    ] {
        let (status, v) = json_call(Method::GET, uri, None).await;
        assert_eq!(status, code, "{uri}");
        assert_eq!(v["status"], code.as_u16());
        assert!(v["error"].is_string());
    }
}

#[tokio::test]
async fn single_instance() {
    let (status, v) = json_call(Method::GET, "/api/instance/BC-%7B16%7D", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["log2_p_m"], -16.0);
    assert_eq!(v["scaled_p_m"], "2^-16");
    assert_eq!(v["c"], 2);
    assert_eq!(v["s"], true);
    assert_eq!(v["m"], 416);
    assert_eq!(v["provenance"]["mafia"]["provenance"], "closed-form");

    let (status, _) = json_call(Method::GET, "/api/instance/BC-%7B999%7D", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = json_call(Method::GET, "/api/nothing-here", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn pareto_queries() {
    let (status, v) = json_call(Method::POST, "/api/pareto", Some(json!({"y": "2^-16"}))).await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"BC-{16}"));
    assert_eq!(v["totals"]["BC"], 241);
    assert_eq!(v["member_ids"].as_array().unwrap().len(), 1098);
    assert_eq!(v["y"], "2^-16");

    let (status, v) = json_call(Method::POST, "/api/pareto", Some(json!({"y": "0"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert!(v["rows"].as_array().unwrap().is_empty());

    let (status, v) = json_call(
        Method::POST,
        "/api/pareto",
        Some(json!({"y": "0.5", "protocols": ["BC", "SKI"]})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn pareto_errors() {
    for (body, code) in [
        (r#"{"y": "2"}"#, StatusCode::UNPROCESSABLE_ENTITY),
        (r#"{"y": "-0.5"}"#, StatusCode::UNPROCESSABLE_ENTITY),
        (r#"{"y": "2^-x"}"#, StatusCode::BAD_REQUEST),
        (r#"{"y": "2^-16", "colour": 1}"#, StatusCode::BAD_REQUEST),
        (r#"{"y": 5}"#, StatusCode::BAD_REQUEST),
        (r#"{"y": "#, StatusCode::BAD_REQUEST),
        (
            r#"{"y": "2^-16", "protocols": ["Nope"]}"#,
            StatusCode::NOT_FOUND,
        ),
        (
            r#"{"y": "2^-16", "constants": {"delta": 0}}"#,
            StatusCode::BAD_REQUEST,
        ),
    ] {
        let (status, _, bytes) = call(Method::POST, "/api/pareto", Some(body)).await;
        assert_eq!(status, code, "{body}");
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        assert!(v["error"].is_string(), "{body}");
    }
}

#[tokio::test]
async fn constants_override_changes_memory_only_where_it_should() {
    let body = json!({"y": "2^-128", "protocols": ["Tree"], "constants": {"delta": 1024}});
    let (status, v) = json_call(Method::POST, "/api/pareto", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    let (_, base) = json_call(
        Method::POST,
        "/api/pareto",
        Some(json!({"y": "2^-128", "protocols": ["Tree"]})),
    )
    .await;
    assert_eq!(base["rows"][0]["id"], "Tree-{150,30}");
    assert!(v["rows"][0]["m_kb"].as_u64() >= base["rows"][0]["m_kb"].as_u64());
}

#[tokio::test]
async fn identical_requests_identical_bytes() {
    let body = r#"{"y": "2^-32"}"#;
    let a = call(Method::POST, "/api/pareto", Some(body)).await;
    let b = call(Method::POST, "/api/pareto", Some(body)).await;
    assert_eq!(a.0, StatusCode::OK);
    assert_eq!(a, b);
}

#[tokio::test]
async fn spider_chart() {
    let body = r#"{"instance_ids": ["BC-{16}", "Tree-{16,8}"]}"#;
    let (status, ctype, bytes) = call(Method::POST, "/api/chart/spider", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype, "image/svg+xml");
    let svg = String::from_utf8(bytes).unwrap();
    assert_eq!(svg.matches(r#"class="instance""#).count(), 2);

    let body = r#"{"instance_ids": ["SwissKnife-{128}", "SKI-{64,2}"], "normalization": {"kind": "ideal", "rounds": 128}}"#;
    let (status, _, _) = call(Method::POST, "/api/chart/spider", Some(body)).await;
    assert_eq!(status, StatusCode::OK);

    for (body, code) in [
        (r#"{"instance_ids": []}"#, StatusCode::BAD_REQUEST),
        (
            r#"{"instance_ids": ["BC-{1}","BC-{2}","BC-{3}","BC-{4}","BC-{5}","BC-{6}","BC-{7}"]}"#,
            StatusCode::BAD_REQUEST,
        ),
        (r#"{"instance_ids": ["BC-{0}"]}"#, StatusCode::NOT_FOUND),
        (r#"{"ids": ["BC-{1}"]}"#, StatusCode::BAD_REQUEST),
    ] {
        let (status, _, _) = call(Method::POST, "/api/chart/spider", Some(body)).await;
        assert_eq!(status, code, "{body}");
    }
}
