//! Loss-to-trainer routing shared by the command-line tool and the examples.

use crate::concave::train_concave_with;
use crate::config::TrainConfig;
use crate::convex::{train_l1_with, train_l2_with};
use crate::error::{Error, Result};
use crate::io::{certificate_json, ResultWire};
use crate::linf::train_linf_interval;
use crate::model::{loss_value_with_precision, Dataset, LossSpec};
use crate::cells::TrainStats;
use crate::rational::Rational;

/// Which algorithm a `(loss, k)` request runs on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    L1,
    L2,
    Concave(Rational),
    LinfInterval,
}

pub fn select_backend(loss: &LossSpec, k: usize) -> Result<Backend> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    match loss {
        LossSpec::Lp(p) if *p == Rational::one() => Ok(Backend::L1),
        LossSpec::Lp(p) if *p == Rational::from(2i64) => Ok(Backend::L2),
        LossSpec::Lp(p) if !p.is_negative() && *p < Rational::one() => Ok(Backend::Concave(p.clone())),
        LossSpec::Lp(p) => Err(Error::UnsupportedLoss(format!(
            "p = {p} has no exact trainer; use p in [0, 1] or p = 2"
        ))),
        LossSpec::LinfInterval if k == 1 => Ok(Backend::LinfInterval),
        LossSpec::LinfInterval => Err(Error::UnsupportedLoss(format!(
            "the interval max-loss trainer handles k = 1 only, got k = {k}"
        ))),
    }
}

/// Trains and packages the outcome as a result file.
pub fn train(data: &Dataset, k: usize, loss: &LossSpec, cfg: &TrainConfig) -> Result<ResultWire> {
    let backend = select_backend(loss, k)?;
    let result = match backend {
        Backend::L1 => train_l1_with(data, k, cfg)?,
        Backend::L2 => train_l2_with(data, k, cfg)?,
        Backend::Concave(p) => train_concave_with(data, k, &p, cfg)?,
        Backend::LinfInterval => {
            let r = train_linf_interval(data)?;
            let net = r.network();
            let loss_value = loss_value_with_precision(&net, data, loss, cfg.precision_bits)?;
            return Ok(ResultWire {
                loss: (&loss_value).into(),
                model: (&net).into(),
                certificate: serde_json::json!({ "s_star": r.s_star, "gamma_star": r.gamma_star }),
                stats: TrainStats { subproblems: r.lp_solves, lp_solves: r.lp_solves, skipped_singular: 0 },
            });
        }
    };
    Ok(ResultWire {
        loss: (&result.loss).into(),
        model: (&result.network).into(),
        certificate: certificate_json(&result.certificate),
        stats: result.stats,
    })
}
