//! Contrast of images.
//!
//! `michelson` mode treats each channel as the multiplication operator by its
//! sample function, so the contrast is `(I_max - I_min)/(I_max + I_min)` and
//! depends only on the multiset of sample values. `delta2` mode treats each
//! channel as a `height x width` matrix and uses squared singular values, so
//! it depends on the spatial arrangement.

use serde::{Deserialize, Serialize};

use crate::blocks::{delta2_prime, ChannelStack};
use crate::contrast::delta2;
use crate::error::{Error, Result};
use crate::pnm::ImageChannels;
use crate::report::{InputInfo, Metric, ReportDocument};

/// Classical Michelson contrast of nonnegative samples. All-zero input gives 1.
pub fn michelson_contrast(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(v) = samples.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidArgument(format!("sample {v} is not a nonnegative number")));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi == 0.0 {
        return Ok(1.0);
    }
    Ok((hi - lo) / (hi + lo))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ImageMode {
    Michelson,
    Delta2,
}

fn channel_names(n: usize) -> Vec<&'static str> {
    match n {
        1 => vec!["gray"],
        3 => vec!["r", "g", "b"],
        _ => vec!["c"; n],
    }
}

pub fn image_contrast_report(img: &ImageChannels, mode: ImageMode, path: Option<&str>) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new(
        InputInfo {
            path: path.map(str::to_string),
            shape: vec![img.channel_count(), img.height, img.width],
        },
        serde_json::json!({ "mode": mode, "maxval": img.maxval }),
    );
    let names = channel_names(img.channel_count());
    match mode {
        ImageMode::Michelson => {
            let mut overall = 0.0f64;
            for (ch, name) in img.channels.iter().zip(&names) {
                let v = michelson_contrast(ch)?;
                overall = overall.max(v);
                doc.push(Metric::plain(format!("michelson.{name}"), v));
            }
            doc.push(Metric::plain("michelson.max", overall));
        }
        ImageMode::Delta2 => {
            let mats: Vec<_> = (0..img.channel_count()).map(|c| img.channel_matrix(c)).collect();
            for (m, name) in mats.iter().zip(&names) {
                doc.push(Metric::plain(format!("delta2.{name}"), delta2(m)?));
            }
            let stack = ChannelStack::new(mats)?;
            doc.push(Metric::plain("delta2_prime", delta2_prime(&stack)?));
        }
    }
    Ok(doc)
}
