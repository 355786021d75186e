//! One-call rendering of a finite region: generate, lay out, serialize.
//! The command line and the HTTP service both go through [`render_region`],
//! so equal requests give byte-identical documents.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::layout::{layout_network_with, LayoutError, LayoutOptions, DEFAULT_BASE_WIDTH};
use crate::network::{generate_network, NetworkError};
use crate::scene::{emit_graph_interchange, emit_vrml, SceneOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionFormat {
    #[default]
    Interchange,
    Wrl,
}

impl RegionFormat {
    pub fn media_type(self) -> &'static str {
        match self {
            RegionFormat::Interchange => "application/json",
            RegionFormat::Wrl => "model/vrml",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionFormat::Interchange => "interchange",
            RegionFormat::Wrl => "wrl",
        }
    }
}

impl fmt::Display for RegionFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown format {0:?}; expected interchange or wrl")]
pub struct UnknownFormat(pub String);

impl FromStr for RegionFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interchange" | "json" => Ok(RegionFormat::Interchange),
            "wrl" | "vrml" => Ok(RegionFormat::Wrl),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionRequest {
    pub seed: u64,
    pub max_value: u64,
    pub max_generation: Option<u32>,
    pub format: RegionFormat,
}

impl RegionRequest {
    pub fn new(max_value: u64) -> RegionRequest {
        RegionRequest {
            seed: 1,
            max_value,
            max_generation: None,
            format: RegionFormat::default(),
        }
    }
}

/// Upper bounds on a request; `None` means no bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionLimits {
    pub max_value: Option<u64>,
    pub max_generation: Option<u32>,
}

impl RegionLimits {
    /// What the HTTP service accepts.
    pub const SERVICE: RegionLimits = RegionLimits {
        max_value: Some(10_000_000),
        max_generation: Some(64),
    };
    pub const NONE: RegionLimits = RegionLimits {
        max_value: None,
        max_generation: None,
    };
}

/// Whether the caller sent something malformed or something well-formed
/// that cannot be served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Invalid,
    Unprocessable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("{param} must be a positive integer")]
    NotPositive { param: &'static str },
    #[error("{param} = {value} exceeds the limit {limit}")]
    OverLimit {
        param: &'static str,
        value: u64,
        limit: u64,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

impl RegionError {
    pub fn class(&self) -> ErrorClass {
        match self {
            RegionError::NotPositive { .. } => ErrorClass::Invalid,
            _ => ErrorClass::Unprocessable,
        }
    }

    /// Stable machine-readable tag.
    pub fn reason(&self) -> &'static str {
        match self {
            RegionError::NotPositive { .. } => "invalid_parameter",
            RegionError::OverLimit { .. } => "limit_exceeded",
            RegionError::Network(NetworkError::ValueTooLarge(_)) => "limit_exceeded",
            RegionError::Network(NetworkError::ZeroSeed) => "invalid_parameter",
            RegionError::Network(NetworkError::Cell(_)) => "overflow",
            RegionError::Layout(LayoutError::WidthUnderflow { .. }) => "width_underflow",
            RegionError::Layout(_) => "layout_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedRegion {
    pub body: String,
    pub media_type: &'static str,
}

pub fn render_region(
    req: &RegionRequest,
    limits: &RegionLimits,
) -> Result<RenderedRegion, RegionError> {
    if req.seed == 0 {
        return Err(RegionError::NotPositive { param: "seed" });
    }
    if req.max_value == 0 {
        return Err(RegionError::NotPositive { param: "max_value" });
    }
    if let Some(limit) = limits.max_value {
        if req.max_value > limit {
            return Err(RegionError::OverLimit {
                param: "max_value",
                value: req.max_value,
                limit,
            });
        }
    }
    if let (Some(limit), Some(g)) = (limits.max_generation, req.max_generation) {
        if g > limit {
            return Err(RegionError::OverLimit {
                param: "max_gen",
                value: u64::from(g),
                limit: u64::from(limit),
            });
        }
    }
    let net = generate_network(req.seed, req.max_value, req.max_generation)?;
    let placed = layout_network_with(
        net,
        &LayoutOptions {
            base_width: Dyadic::from_integer(DEFAULT_BASE_WIDTH),
            ..LayoutOptions::default()
        },
    )?;
    let body = match req.format {
        RegionFormat::Interchange => emit_graph_interchange(&placed),
        RegionFormat::Wrl => emit_vrml(&placed, &SceneOptions::default()),
    };
    Ok(RenderedRegion {
        body,
        media_type: req.format.media_type(),
    })
}
