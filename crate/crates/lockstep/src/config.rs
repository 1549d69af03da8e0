//! Run and window configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the bipartite graph acts as star center.
///
/// A run uses exactly one orientation; the galaxy graph holds one star type
/// at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarOrientation {
    /// Center = domain, leaves = downloaders accessing it.
    DlrDom,
    /// Center = downloader, leaves = domains it accesses.
    DomDlr,
}

impl StarOrientation {
    pub fn as_str(self) -> &'static str {
        match self {
            StarOrientation::DlrDom => "dlr:dom",
            StarOrientation::DomDlr => "dom:dlr",
        }
    }
}

pub const SECONDS_PER_DAY: u64 = 86_400;

/// Windowing and detection parameters.
///
/// `window_len` is the star time window; `slide` is the window advance.
/// `alpha_min` is the edge-density floor a near-biclique must keep.
/// `level_cut` bounds FP-tree depth in streaming runs; `campaign_gap_n`
/// is the gap multiplier that splits campaigns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window_len: u64,
    pub slide: u64,
    pub alpha_min: f64,
    pub level_cut: Option<u32>,
    pub campaign_gap_n: u32,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            window_len: 3 * SECONDS_PER_DAY,
            slide: 3 * SECONDS_PER_DAY,
            alpha_min: 0.8,
            level_cut: Some(7),
            campaign_gap_n: 3,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len == 0 || self.slide == 0 {
            return Err(Error::InvalidConfig(
                "window_len and slide must be positive".into(),
            ));
        }
        if !(self.alpha_min > 0.5 && self.alpha_min <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha_min must lie in (0.5, 1.0], got {}",
                self.alpha_min
            )));
        }
        if self.campaign_gap_n == 0 {
            return Err(Error::InvalidConfig("campaign_gap_n must be >= 1".into()));
        }
        if let Some(cut) = self.level_cut {
            if cut == 0 {
                return Err(Error::InvalidConfig("level_cut must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Schedule origin: the first event timestamp floored to slide granularity.
    pub fn schedule_origin(&self, first_ts: i64) -> i64 {
        first_ts.div_euclid(self.slide as i64) * self.slide as i64
    }

    pub fn window_start(&self, origin: i64, index: u64) -> i64 {
        origin + (index as i64) * self.slide as i64
    }

    pub fn window_end(&self, origin: i64, index: u64) -> i64 {
        self.window_start(origin, index) + self.window_len as i64
    }
}

/// Consecutive windows of length `window_len` advancing by `slide`, starting
/// at `origin` and continuing while the window start does not pass `max_ts`.
pub fn window_schedule(cfg: &WindowConfig, origin: i64, max_ts: i64) -> Vec<(i64, i64)> {
    let mut windows = Vec::new();
    let mut index = 0u64;
    loop {
        let start = cfg.window_start(origin, index);
        if start > max_ts {
            break;
        }
        windows.push((start, cfg.window_end(origin, index)));
        index += 1;
    }
    windows
}
