//! Catalog riggings.

use std::sync::Arc;

use super::spacetime::Spacetime;
use crate::error::{Error, Result};
use crate::geometry::{ChartMetric, JetMap, JetScalar};
use crate::jet::Jet;
use crate::rigging::{gradient_rigging, RiggingField};

/// Names accepted by [`make_rigging`].
pub const RIGGING_NAMES: &[&str] = &["dt", "f_dt", "sqrt2_dt", "grad(h)", "dt_rot"];

fn time_field(n: usize, coef: impl Fn(&Jet) -> Jet + Send + Sync + 'static) -> JetMap {
    Arc::new(move |x: &[Jet]| {
        let mut v = vec![Jet::constant(0.0); n];
        v[0] = coef(&x[0]);
        v
    })
}

/// `dt`: `∂t`; `f_dt`: `f(t)∂t`; `sqrt2_dt`: `√2 ∂t`; `grad(h)`: `∇̄h` with
/// `h′ = −f`; `dt_rot`: `∂t + x∂y − y∂x` (flat fibers, not closed).
pub fn make_rigging(name: &str, st: &Spacetime) -> Result<RiggingField> {
    let n = st.dim();
    let warp = st.warp_or_one();
    match name {
        "dt" => {
            let pot: JetScalar = Arc::new(|x: &[Jet]| -x[0].clone());
            Ok(RiggingField::new("dt", time_field(n, |t| Jet::constant_like(1.0, t))).with_potential(pot))
        }
        "sqrt2_dt" => {
            let s = std::f64::consts::SQRT_2;
            let pot: JetScalar = Arc::new(move |x: &[Jet]| &x[0] * -s);
            Ok(RiggingField::new("sqrt2_dt", time_field(n, move |t| Jet::constant_like(s, t))).with_potential(pot))
        }
        "f_dt" => {
            let w = warp.clone();
            let pot: JetScalar = Arc::new(move |x: &[Jet]| warp.neg_primitive(&x[0]));
            Ok(RiggingField::new("f_dt", time_field(n, move |t| w.eval(t))).with_potential(pot))
        }
        "grad(h)" => {
            let pot: JetScalar = Arc::new(move |x: &[Jet]| warp.neg_primitive(&x[0]));
            let mut probe = vec![0.0; n];
            probe[0] = st.warp_or_one().reference_time();
            let probes: Vec<Vec<f64>> = if st.chart.domain().contains(&probe) { vec![probe] } else { vec![] };
            let (rig, _) = gradient_rigging(st.chart.clone(), "grad(h)", pot, &probes)?;
            Ok(rig)
        }
        "dt_rot" => {
            if !matches!(st.fiber, super::spacetime::FiberSpec::Flat { dim } if dim >= 2) {
                return Err(Error::InvalidSpec("dt_rot needs a flat fiber of dimension >= 2".into()));
            }
            let field: JetMap = Arc::new(move |x: &[Jet]| {
                let mut v = vec![Jet::constant(0.0); n];
                v[0] = Jet::constant(1.0);
                v[1] = -x[2].clone();
                v[2] = x[1].clone();
                v
            });
            Ok(RiggingField::new("dt_rot", field))
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}
