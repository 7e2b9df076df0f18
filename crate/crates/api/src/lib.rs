//! HTTP JSON service for collaborative taxonomy editing, literature review,
//! keyword matching and correlation analysis. Everything lives under
//! `/api/v1`; see [`routes::route_table`] for the access class of each route.

pub mod auth;
pub mod config;
pub mod error;
pub mod extract;
pub mod handlers;
pub mod routes;

use std::ops::Deref;
use std::sync::Arc;
use std::time::Duration;

use taas_core::analysis::{CircleLayout, CorrelationMatrix, CoverageReport, SurfacePoint};
use taas_core::store::{DocumentStore, FileStore, ViewCache, Workspace};
use taas_core::TaxonomyId;
use tokio::net::TcpListener;

pub use auth::{AuthService, IssuedToken, User};
pub use config::{Config, ConfigError, HashCost};
pub use error::{ApiError, ApiResult};
pub use routes::{route_table, router, Access, RouteSpec, API_PREFIX};

/// Derived views, cached per taxonomy version.
#[derive(Default)]
pub struct Views {
    pub matrix: ViewCache<CorrelationMatrix>,
    pub surface: ViewCache<Vec<SurfacePoint>>,
    pub circles: ViewCache<CircleLayout>,
    pub coverage: ViewCache<CoverageReport>,
}

impl Views {
    pub fn invalidate(&self, id: &TaxonomyId) {
        self.matrix.invalidate(id);
        self.surface.invalidate(id);
        self.circles.invalidate(id);
        self.coverage.invalidate(id);
    }
}

pub struct Inner {
    pub workspace: Workspace,
    pub auth: AuthService,
    pub views: Views,
}

/// Shared service state. Cheap to clone.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl Deref for AppState {
    type Target = Inner;

    fn deref(&self) -> &Inner {
        &self.0
    }
}

impl AppState {
    pub fn new(store: Arc<dyn DocumentStore>, config: &Config) -> taas_core::Result<Self> {
        let auth = AuthService::new(
            store.clone(),
            Duration::from_secs(config.token_ttl_secs),
            config.password_hash,
        )?;
        let workspace = Workspace::open(store)?;
        Ok(Self(Arc::new(Inner {
            workspace,
            auth,
            views: Views::default(),
        })))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot open store: {0}")]
    Store(#[from] taas_core::Error),
    #[error("cannot listen: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens the file store named in `config` and serves until Ctrl-C.
pub async fn serve(config: Config) -> Result<(), ServeError> {
    let store = FileStore::open(config.require_storage_path()?)?;
    let state = AppState::new(Arc::new(store), &config)?;
    let listener = TcpListener::bind(config.listen).await?;
    serve_with_listener(listener, state).await
}

pub async fn serve_with_listener(listener: TcpListener, state: AppState) -> Result<(), ServeError> {
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
