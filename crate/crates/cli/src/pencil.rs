use anyhow::{anyhow, bail, Result};
use serde::Serialize;
use vqge_core::oracle::read_dense_csv;
use vqge_core::pauli::{dense_from_pauli, pauli_from_dense};
use vqge_core::{builtin, HermitianMatrix, PauliSum};

use crate::args::PencilArgs;
use crate::output::read;

/// A pencil as loaded from the command line.
pub struct LoadedPencil {
    pub source: Source,
    pub g: PauliSum,
    pub s: PauliSum,
    dense: Option<(HermitianMatrix, HermitianMatrix)>,
    pauli_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Source {
    Builtin { name: String },
    Pauli { g: String, s: String },
    Dense { g: String, s: String },
}

impl LoadedPencil {
    pub fn is_builtin(&self) -> bool {
        matches!(self.source, Source::Builtin { .. })
    }

    /// Pauli sums, which need a `2ⁿ` dimension.
    pub fn pauli(&self) -> Result<(&PauliSum, &PauliSum)> {
        if !self.pauli_ok {
            let dim = self.dense.as_ref().map_or(0, |d| d.0.dim());
            bail!("the variational solver needs a power-of-two dimension ≥ 2, got {dim}");
        }
        Ok((&self.g, &self.s))
    }

    /// Dense forms; converted from the Pauli sums when not read directly.
    pub fn dense(&self) -> Result<(HermitianMatrix, HermitianMatrix)> {
        match &self.dense {
            Some(d) => Ok(d.clone()),
            None => Ok((dense_from_pauli(&self.g)?, dense_from_pauli(&self.s)?)),
        }
    }
}

pub fn load(args: &PencilArgs) -> Result<LoadedPencil> {
    if let Some(name) = &args.builtin {
        let (g, s) = builtin::by_name(name).ok_or_else(|| anyhow!("unknown builtin '{name}' (expected example1 or example2)"))?;
        return Ok(LoadedPencil {
            source: Source::Builtin { name: name.clone() },
            g,
            s,
            dense: None,
            pauli_ok: true,
        });
    }
    if let (Some(gp), Some(sp)) = (&args.g, &args.s) {
        let g = PauliSum::from_text(&read(gp)?).map_err(|e| anyhow!("{}: {e}", gp.display()))?;
        let s = PauliSum::from_text(&read(sp)?).map_err(|e| anyhow!("{}: {e}", sp.display()))?;
        return Ok(LoadedPencil {
            source: Source::Pauli {
                g: gp.display().to_string(),
                s: sp.display().to_string(),
            },
            g,
            s,
            dense: None,
            pauli_ok: true,
        });
    }
    if let (Some(gp), Some(sp)) = (&args.g_dense, &args.s_dense) {
        let gd = HermitianMatrix::new(read_dense_csv(&read(gp)?).map_err(|e| anyhow!("{}: {e}", gp.display()))?)?;
        let sd = HermitianMatrix::new(read_dense_csv(&read(sp)?).map_err(|e| anyhow!("{}: {e}", sp.display()))?)?;
        if gd.dim() != sd.dim() {
            bail!("G is {0}×{0}, S is {1}×{1}", gd.dim(), sd.dim());
        }
        let pauli_ok = gd.dim().is_power_of_two() && gd.dim() >= 2;
        let (g, s) = if pauli_ok {
            (pauli_from_dense(&gd)?, pauli_from_dense(&sd)?)
        } else {
            (PauliSum::zero(1), PauliSum::zero(1))
        };
        return Ok(LoadedPencil {
            source: Source::Dense {
                g: gp.display().to_string(),
                s: sp.display().to_string(),
            },
            g,
            s,
            dense: Some((gd, sd)),
            pauli_ok,
        });
    }
    bail!("no pencil given: use --builtin, --g/--s or --g-dense/--s-dense")
}
