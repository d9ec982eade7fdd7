//! Read-only HTTP endpoints over a precomputed [`Engine`].

use std::collections::HashMap;
use std::net::SocketAddr;
use std::str::FromStr;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use dubrovin_core::engine::{parse_path, Engine, EngineError, REFERENCE_CYCLE};
use dubrovin_core::schubert::YoungDiagram22;
use num_complex::Complex64;
use serde_json::json;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::run::{spectrum_json, sweep_json};

type Params = HashMap<String, String>;

#[derive(Debug)]
pub enum ApiError {
    /// The query does not parse.
    Malformed(String),
    /// The query parses but names no valid computation.
    Invalid(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::Malformed(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Invalid(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
        };
        (status, [(header::CONTENT_TYPE, "application/json")], json!({ "error": msg }).to_string()).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        ApiError::Invalid(e.to_string())
    }
}

fn json_ok(body: String) -> Response {
    (
        [
            (header::CONTENT_TYPE, "application/json"),
            (header::CACHE_CONTROL, "public, max-age=86400"),
        ],
        body,
    )
        .into_response()
}

fn field<T: FromStr>(p: &Params, name: &str, default: T) -> Result<T, ApiError> {
    match p.get(name) {
        None => Ok(default),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| ApiError::Malformed(format!("cannot parse {name}={v:?}"))),
    }
}

fn complex(p: &Params, prefix: &str, default: Complex64) -> Result<Complex64, ApiError> {
    Ok(Complex64::new(
        field(p, &format!("{prefix}_re"), default.re)?,
        field(p, &format!("{prefix}_im"), default.im)?,
    ))
}

fn alpha(p: &Params, engine: &Engine) -> Result<u32, ApiError> {
    let a: i64 = field(p, "alpha", 2)?;
    let max = engine.max_alpha();
    u32::try_from(a)
        .ok()
        .filter(|&a| a <= max)
        .ok_or_else(|| ApiError::Invalid(format!("alpha = {a} is outside 0..={max}")))
}

fn cycle(p: &Params, default: Option<YoungDiagram22>) -> Result<YoungDiagram22, ApiError> {
    match (p.get("cycle"), default) {
        (None, Some(d)) => Ok(d),
        (None, None) => Err(ApiError::Malformed("missing cycle".into())),
        (Some(v), _) => v.parse().map_err(|e: dubrovin_core::schubert::ParseDiagramError| ApiError::Malformed(e.to_string())),
    }
}

async fn meta(State(engine): State<Arc<Engine>>) -> Response {
    json_ok(engine.meta().to_string())
}

async fn spectrum(State(engine): State<Arc<Engine>>, Query(p): Query<Params>) -> Result<Response, ApiError> {
    let cycle = cycle(&p, Some(REFERENCE_CYCLE))?;
    let t = complex(&p, "t", Complex64::new(0.0, 0.0))?;
    let t0 = if p.contains_key("t0_re") || p.contains_key("t0_im") {
        Some(complex(&p, "t0", Complex64::new(0.0, 0.0))?)
    } else {
        None
    };
    let q = complex(&p, "q", Complex64::new(1.0, 0.0))?;
    let alpha = alpha(&p, &engine)?;
    let sample = engine.spectrum(cycle, t, t0, q, alpha)?;
    Ok(json_ok(spectrum_json(&sample)))
}

async fn sweep(State(engine): State<Arc<Engine>>, Query(p): Query<Params>) -> Result<Response, ApiError> {
    let cycle = cycle(&p, None)?;
    let path = p.get("path").ok_or_else(|| ApiError::Malformed("missing path".into()))?;
    let path = parse_path(path).map_err(|e| ApiError::Malformed(e.to_string()))?;
    let q = complex(&p, "q", Complex64::new(1.0, 0.0))?;
    let alpha = alpha(&p, &engine)?;
    let body = tokio::task::spawn_blocking(move || engine.sweep(cycle, &path, q, alpha).map(|s| sweep_json(&s)))
        .await
        .map_err(|e| ApiError::Invalid(e.to_string()))??;
    Ok(json_ok(body))
}

/// `http(s)://localhost`, `127.0.0.1` or `[::1]` on any port.
pub fn is_local_origin(origin: &HeaderValue) -> bool {
    let Some(uri) = origin.to_str().ok().and_then(|s| s.parse::<Uri>().ok()) else {
        return false;
    };
    matches!(uri.scheme_str(), Some("http" | "https"))
        && matches!(uri.host(), Some("localhost" | "127.0.0.1" | "[::1]"))
}

pub fn router(engine: Arc<Engine>) -> Router {
    let cors = CorsLayer::new()
        .allow_methods([Method::GET])
        .allow_origin(AllowOrigin::predicate(|origin, _| is_local_origin(origin)));
    Router::new()
        .route("/api/meta", get(meta))
        .route("/api/spectrum", get(spectrum))
        .route("/api/sweep", get(sweep))
        .layer(cors)
        .with_state(engine)
}

/// Bind to `127.0.0.1:port`, announce the address on stdout and serve
/// until interrupted.
pub async fn serve(engine: Arc<Engine>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], port))).await?;
    println!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_origins() {
        let ok = |s: &str| is_local_origin(&HeaderValue::from_str(s).unwrap());
        assert!(ok("http://localhost:5173"));
        assert!(ok("http://127.0.0.1"));
        assert!(ok("https://[::1]:8080"));
        assert!(!ok("http://example.com"));
        assert!(!ok("http://localhost.example.com"));
        assert!(!ok("null"));
    }
}
