//! Serves red dots over HTTP, logs viewer interactions and refines dots from
//! them.

pub mod api;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use lightor_core::extractor::ExtractorConfig;
use lightor_core::ModelFile;

pub use api::{router, Accepted, RegisterRequest, RegisterResponse};
pub use store::{Diagnostic, RedDotView, RefineResponse, Store, StoreError, VideoRecord};

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub data_dir: PathBuf,
    pub listen: SocketAddr,
    /// Model used for videos registered without one.
    pub model: Option<PathBuf>,
    /// Refine every video on this period, in addition to the endpoint.
    pub refine_interval: Option<Duration>,
    pub extractor: ExtractorConfig,
}

/// Binds, then serves until ctrl-c. `on_bound` receives the bound address,
/// which differs from `listen` when port 0 was asked for.
pub async fn serve(cfg: ServeConfig, on_bound: impl FnOnce(SocketAddr)) -> Result<(), StoreError> {
    let model = cfg.model.as_deref().map(ModelFile::load).transpose()?;
    let store = Arc::new(Store::open(&cfg.data_dir, model, cfg.extractor)?);
    let listener = tokio::net::TcpListener::bind(cfg.listen).await?;
    let addr = listener.local_addr()?;
    log::info!("listening on {addr}");
    on_bound(addr);

    if let Some(period) = cfg.refine_interval {
        let store = store.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            tick.tick().await;
            loop {
                tick.tick().await;
                let store = store.clone();
                let results = tokio::task::spawn_blocking(move || store.refine_all()).await;
                for (id, result) in results.into_iter().flatten() {
                    match result {
                        Ok(r) if !r.reports.is_empty() => log::info!("{id}: refined {} dots", r.reports.len()),
                        Ok(_) => {}
                        Err(e) => log::warn!("{id}: refine failed: {e}"),
                    }
                }
            }
        });
    }

    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
            log::info!("shutting down");
        })
        .await?;
    Ok(())
}
