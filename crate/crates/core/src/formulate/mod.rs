//! Lowers a validated [`EnergySystem`] into a [`LinearProgram`].
//!
//! Variables are declared first, then one emitter per equation family adds
//! its rows, bounds or objective terms. Rows are finally sorted by
//! (primary tag, owner, step), so the output does not depend on emitter order.

mod commitment;
mod emit;
mod objective;
mod storage;

use serde::{Deserialize, Serialize};

use crate::lp::{LinearProgram, ProgramError, VarKind, VarRef};
use crate::model::{
    validate_system, CommitmentSpec, Component, ConversionSpec, EnergySystem, RampSpec, RateMode,
    UnitCount, ValidationReport,
};

pub use commitment::emit_unit_commitment;
pub use emit::{
    emit_build_periods, emit_capacity_limits, emit_characteristic_field, emit_co2_cap,
    emit_max_installed, emit_node_balances, emit_ramp_limits,
};
pub use objective::{capacity_cost_rate, emit_objective};
pub use storage::emit_storage;

/// How storage fill levels enter the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageForm {
    /// One fill variable per step linked by `fill_t = fill_{t−1} + net inflow`.
    #[default]
    Recurrence,
    /// Bounds on the running sum of net inflows, without fill variables.
    CumulativeSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CompileOptions {
    #[serde(default)]
    pub storage_form: StorageForm,
}

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("system is invalid ({} errors)", .0.errors().count())]
    Invalid(ValidationReport),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

pub fn compile(sys: &EnergySystem) -> Result<LinearProgram, CompileError> {
    compile_with(sys, &CompileOptions::default())
}

pub fn compile_with(
    sys: &EnergySystem,
    opts: &CompileOptions,
) -> Result<LinearProgram, CompileError> {
    let report = validate_system(sys);
    if !report.is_valid() {
        return Err(CompileError::Invalid(report));
    }
    let mut prog = LinearProgram::new();
    declare_variables(sys, &mut prog, opts.storage_form)?;
    emit_max_installed(sys, &mut prog);
    emit_capacity_limits(sys, &mut prog);
    emit_node_balances(sys, &mut prog);
    emit_characteristic_field(sys, &mut prog);
    emit_storage(sys, &mut prog, opts.storage_form);
    emit_ramp_limits(sys, &mut prog);
    emit_build_periods(sys, &mut prog);
    emit_unit_commitment(sys, &mut prog);
    emit_objective(sys, &mut prog);
    emit_co2_cap(sys, &mut prog);
    prog.canonicalize();
    prog.check()?;
    Ok(prog)
}

/// Declares every decision variable with its natural bounds.
pub fn declare_variables(
    sys: &EnergySystem,
    prog: &mut LinearProgram,
    form: StorageForm,
) -> Result<(), ProgramError> {
    let steps = sys.time_grid.num_steps();
    let periods = sys.time_grid.num_periods();
    let inf = f64::INFINITY;
    for c in &sys.components {
        let id = c.id.as_str();
        for t in 0..steps {
            prog.add_var(VarRef::at(VarKind::Pout, id, t), 0.0, inf)?;
        }
        if let ConversionSpec::CharacteristicField { .. } = c.conversion {
            for t in 0..steps {
                prog.add_var(VarRef::at(VarKind::PoutSecondary, id, t), 0.0, inf)?;
            }
        }
        match &c.commitment {
            CommitmentSpec::None => {
                if c.capacity.optimizable && c.capacity.per_period {
                    for p in 0..periods {
                        prog.add_var(VarRef::at(VarKind::PinstalledPeriod, id, p), 0.0, inf)?;
                    }
                    for p in 1..periods {
                        prog.add_var(VarRef::at(VarKind::Pbuilt, id, p), 0.0, inf)?;
                    }
                } else if c.capacity.optimizable {
                    prog.add_var(VarRef::scalar(VarKind::Pinstalled, id), 0.0, inf)?;
                }
            }
            CommitmentSpec::UnitCommit { units, .. } => {
                let max = units.max() as f64;
                for t in 0..steps {
                    prog.add_integer_var(VarRef::at(VarKind::On, id, t), 0.0, max)?;
                }
                for t in 0..steps {
                    prog.add_integer_var(VarRef::at(VarKind::Startup, id, t), 0.0, max)?;
                }
                if let UnitCount::Optimized { max } = units {
                    prog.add_integer_var(VarRef::scalar(VarKind::Units, id), 0.0, *max as f64)?;
                }
            }
        }
        if let RampSpec::Optimized { .. } = c.ramp {
            prog.add_var(VarRef::scalar(VarKind::LcrUpVar, id), 0.0, inf)?;
            prog.add_var(VarRef::scalar(VarKind::LcrDownVar, id), 0.0, inf)?;
        }
    }
    for s in &sys.storages {
        let id = s.id.as_str();
        for t in 0..steps {
            prog.add_var(VarRef::at(VarKind::Pcharge, id, t), 0.0, inf)?;
        }
        for t in 0..steps {
            prog.add_var(VarRef::at(VarKind::Pdischarge, id, t), 0.0, inf)?;
        }
        if form == StorageForm::Recurrence {
            for t in 0..steps {
                prog.add_var(VarRef::at(VarKind::Fill, id, t), 0.0, inf)?;
            }
        }
        if s.capacity_optimizable {
            prog.add_var(
                VarRef::scalar(VarKind::CapacityVar, id),
                0.0,
                s.expansion_limit(),
            )?;
        }
        if let RateMode::Optimized { .. } = s.rate {
            prog.add_var(VarRef::scalar(VarKind::PmaxchargeVar, id), 0.0, inf)?;
            prog.add_var(VarRef::scalar(VarKind::PmaxdischargeVar, id), 0.0, inf)?;
        }
    }
    Ok(())
}

pub(crate) fn var(prog: &LinearProgram, kind: VarKind, owner: &str, index: usize) -> usize {
    prog.lookup(kind, owner, Some(index))
        .unwrap_or_else(|| panic!("{kind:?} of '{owner}' at {index} was not declared"))
}

pub(crate) fn scalar(prog: &LinearProgram, kind: VarKind, owner: &str) -> Option<usize> {
    prog.lookup(kind, owner, None)
}

/// Installed capacity of `c` during step `t` as variable terms plus a constant.
pub(crate) fn capacity_terms(
    sys: &EnergySystem,
    prog: &LinearProgram,
    c: &Component,
    t: usize,
) -> (Vec<(usize, f64)>, f64) {
    match &c.commitment {
        CommitmentSpec::UnitCommit {
            unit_capacity,
            units,
            ..
        } => match units {
            UnitCount::Fixed(n) => (Vec::new(), *n as f64 * unit_capacity),
            UnitCount::Optimized { .. } => {
                let u = scalar(prog, VarKind::Units, &c.id).expect("units declared");
                (vec![(u, *unit_capacity)], 0.0)
            }
        },
        CommitmentSpec::None => {
            let mut terms = Vec::new();
            if c.capacity.optimizable {
                let j = if c.capacity.per_period {
                    var(
                        prog,
                        VarKind::PinstalledPeriod,
                        &c.id,
                        sys.time_grid.period(t),
                    )
                } else {
                    scalar(prog, VarKind::Pinstalled, &c.id).expect("Pinstalled declared")
                };
                terms.push((j, 1.0));
            }
            (terms, c.capacity.initial_installed)
        }
    }
}

/// Input drawn by `c` during step `t`: `Pout / η`, or `p · Pout + o · on`
/// under a partial-load model.
pub(crate) fn input_terms(prog: &LinearProgram, c: &Component, t: usize) -> Vec<(usize, f64)> {
    let pout = var(prog, VarKind::Pout, &c.id, t);
    match c.commitment.partial_load() {
        Some(pl) => vec![
            (pout, pl.slope),
            (var(prog, VarKind::On, &c.id, t), pl.offset),
        ],
        None => vec![(pout, c.input_per_output())],
    }
}
