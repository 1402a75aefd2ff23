use crate::error::Result;
use crate::geometry::{ChartMetric, DomainBox, Signature};
use crate::hypersurface::Immersion;
use crate::jet::Jet;
use crate::rigging::{local_rigging, rigged_structure_at, RiggingField};
use crate::sampling::SampleSpec;

/// `(M, g̃)` on the parameter domain of an immersion.
#[derive(Clone, Debug)]
pub struct RiggedMetricChart {
    pub imm: Immersion,
    pub rig: RiggingField,
    name: String,
}

impl RiggedMetricChart {
    pub fn sample_box(&self) -> &DomainBox {
        &self.imm.sample_box
    }
}

/// Build the rigged chart, checking transversality and positivity at a few probes.
pub fn rigged_metric_chart(imm: &Immersion, rig: &RiggingField) -> Result<RiggedMetricChart> {
    for u in imm.samples(SampleSpec::new(8, 0x7e57)) {
        let rs = rigged_structure_at(imm, rig, &u)?;
        if rs.gtilde.clone().cholesky().is_none() {
            return Err(crate::error::Error::SignatureMismatch {
                point: u,
                expected: 0,
                found: 1,
            });
        }
    }
    Ok(RiggedMetricChart {
        imm: imm.clone(),
        rig: rig.clone(),
        name: format!("rigged({}, {})", imm.name, rig.label),
    })
}

impl ChartMetric for RiggedMetricChart {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.imm.param_dim()
    }

    fn domain(&self) -> &DomainBox {
        &self.imm.param_domain
    }

    fn signature(&self) -> Signature {
        Signature::Riemannian
    }

    fn metric_jet(&self, u: &[f64], order: usize) -> Result<Vec<Jet>> {
        Ok(local_rigging(&self.imm, &self.rig, u, order)?.gtilde)
    }
}
