//! Blocking client for the service endpoints.

use anyhow::{Context, Result};
use lightor_core::extractor::InteractionEvent;
use lightor_service::{Accepted, RedDotView, RefineResponse, RegisterRequest, RegisterResponse, VideoRecord};
use serde::de::DeserializeOwned;

pub struct Client {
    base: String,
    agent: ureq::Agent,
}

impl Client {
    pub fn new(base: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .build()
            .new_agent();
        Self {
            base: base.trim_end_matches('/').to_string(),
            agent,
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    fn read<T: DeserializeOwned>(what: &str, mut resp: ureq::http::Response<ureq::Body>) -> Result<T> {
        let status = resp.status();
        let text = resp.body_mut().read_to_string().with_context(|| format!("{what}: reading body"))?;
        if !status.is_success() {
            anyhow::bail!("{what}: {status}: {text}");
        }
        serde_json::from_str(&text).with_context(|| format!("{what}: decoding {text}"))
    }

    pub fn healthy(&self) -> bool {
        self.agent
            .get(&self.url("/healthz"))
            .call()
            .is_ok_and(|r| r.status().is_success())
    }

    pub fn register(&self, req: &RegisterRequest) -> Result<RegisterResponse> {
        let resp = self.agent.post(&self.url("/videos")).send_json(req)?;
        Self::read(&format!("register {}", req.video_id), resp)
    }

    pub fn red_dots(&self, video: &str) -> Result<Vec<RedDotView>> {
        let resp = self.agent.get(&self.url(&format!("/videos/{video}/reddots"))).call()?;
        Self::read(&format!("red dots of {video}"), resp)
    }

    pub fn record(&self, video: &str) -> Result<VideoRecord> {
        let resp = self.agent.get(&self.url(&format!("/videos/{video}"))).call()?;
        Self::read(&format!("record of {video}"), resp)
    }

    pub fn post_events(&self, video: &str, events: &[InteractionEvent]) -> Result<usize> {
        let resp = self
            .agent
            .post(&self.url(&format!("/videos/{video}/interactions")))
            .send_json(events)?;
        Ok(Self::read::<Accepted>(&format!("events for {video}"), resp)?.accepted)
    }

    pub fn refine(&self, video: &str) -> Result<RefineResponse> {
        let resp = self
            .agent
            .post(&self.url(&format!("/videos/{video}/refine")))
            .send_empty()?;
        Self::read(&format!("refine {video}"), resp)
    }
}
