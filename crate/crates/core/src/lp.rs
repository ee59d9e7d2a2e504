//! Solver-agnostic standard form.
//!
//! A [`LinearProgram`] is a minimisation problem over bounded variables with
//! sparse rows `Σ a_j x_j {≤,=,≥} b`. Every variable carries a [`VarRef`] that
//! names the domain quantity it stands for, and every row carries the set of
//! equation families it implements.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

/// Decision-variable kinds produced by the compiler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarKind {
    Pout,
    /// Dedicated secondary output of a characteristic-field component.
    PoutSecondary,
    Pinstalled,
    PinstalledPeriod,
    Pbuilt,
    Pcharge,
    Pdischarge,
    /// Auxiliary storage fill level at the end of a step.
    Fill,
    CapacityVar,
    PmaxchargeVar,
    PmaxdischargeVar,
    LcrUpVar,
    LcrDownVar,
    On,
    Startup,
    Units,
}

impl VarKind {
    /// Kinds that may carry an integrality flag.
    pub fn is_discrete(self) -> bool {
        matches!(self, VarKind::On | VarKind::Startup | VarKind::Units)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            VarKind::Pout => "Pout",
            VarKind::PoutSecondary => "Pout2",
            VarKind::Pinstalled => "Pinstalled",
            VarKind::PinstalledPeriod => "PinstalledP",
            VarKind::Pbuilt => "Pbuilt",
            VarKind::Pcharge => "Pcharge",
            VarKind::Pdischarge => "Pdischarge",
            VarKind::Fill => "Fill",
            VarKind::CapacityVar => "Capacity",
            VarKind::PmaxchargeVar => "Pmaxcharge",
            VarKind::PmaxdischargeVar => "Pmaxdischarge",
            VarKind::LcrUpVar => "LCRup",
            VarKind::LcrDownVar => "LCRdown",
            VarKind::On => "on",
            VarKind::Startup => "startup",
            VarKind::Units => "units",
        }
    }
}

/// Identity of one variable: kind, owning component or storage, and the
/// step or period index where the kind is indexed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarRef {
    pub kind: VarKind,
    pub owner: String,
    pub index: Option<usize>,
}

impl VarRef {
    pub fn new(kind: VarKind, owner: impl Into<String>, index: Option<usize>) -> Self {
        VarRef {
            kind,
            owner: owner.into(),
            index,
        }
    }

    pub fn at(kind: VarKind, owner: &str, index: usize) -> Self {
        VarRef::new(kind, owner, Some(index))
    }

    pub fn scalar(kind: VarKind, owner: &str) -> Self {
        VarRef::new(kind, owner, None)
    }

    /// Name usable as an identifier in LP-format files.
    pub fn lp_name(&self) -> String {
        let mut name = String::with_capacity(self.owner.len() + 16);
        name.push_str(self.kind.symbol());
        name.push('_');
        name.extend(self.owner.chars().map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        }));
        if let Some(i) = self.index {
            let _ = write!(name, "_{}", i + 1);
        }
        name
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{},{}]", self.kind.symbol(), self.owner, i),
            None => write!(f, "{}[{}]", self.kind.symbol(), self.owner),
        }
    }
}

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// One equation family of the formulation, numbered 1 to 29.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqTag(u8);

impl EqTag {
    pub const COUNT: u8 = 29;

    pub const fn new(n: u8) -> Self {
        assert!(n >= 1 && n <= Self::COUNT, "equation tag out of range");
        EqTag(n)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = EqTag> {
        (1..=Self::COUNT).map(EqTag)
    }
}

/// Equation-family tags by number.
pub mod eq {
    use super::EqTag;

    pub const EQ1: EqTag = EqTag::new(1);
    pub const EQ2: EqTag = EqTag::new(2);
    pub const EQ3: EqTag = EqTag::new(3);
    pub const EQ4: EqTag = EqTag::new(4);
    pub const EQ5: EqTag = EqTag::new(5);
    pub const EQ6: EqTag = EqTag::new(6);
    pub const EQ7: EqTag = EqTag::new(7);
    pub const EQ8: EqTag = EqTag::new(8);
    pub const EQ9: EqTag = EqTag::new(9);
    pub const EQ10: EqTag = EqTag::new(10);
    pub const EQ11: EqTag = EqTag::new(11);
    pub const EQ12: EqTag = EqTag::new(12);
    pub const EQ13: EqTag = EqTag::new(13);
    pub const EQ14: EqTag = EqTag::new(14);
    pub const EQ15: EqTag = EqTag::new(15);
    pub const EQ16: EqTag = EqTag::new(16);
    pub const EQ17: EqTag = EqTag::new(17);
    pub const EQ18: EqTag = EqTag::new(18);
    pub const EQ19: EqTag = EqTag::new(19);
    pub const EQ20: EqTag = EqTag::new(20);
    pub const EQ21: EqTag = EqTag::new(21);
    pub const EQ22: EqTag = EqTag::new(22);
    pub const EQ23: EqTag = EqTag::new(23);
    pub const EQ24: EqTag = EqTag::new(24);
    pub const EQ25: EqTag = EqTag::new(25);
    pub const EQ26: EqTag = EqTag::new(26);
    pub const EQ27: EqTag = EqTag::new(27);
    pub const EQ28: EqTag = EqTag::new(28);
    pub const EQ29: EqTag = EqTag::new(29);
}

impl fmt::Display for EqTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EQ{}", self.0)
    }
}

impl Serialize for EqTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Set of equation tags attached to a row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EqTags(u32);

impl EqTags {
    pub fn of(tag: EqTag) -> Self {
        EqTags(1 << tag.0)
    }

    pub fn insert(&mut self, tag: EqTag) {
        self.0 |= 1 << tag.0;
    }

    pub fn with(mut self, tag: EqTag) -> Self {
        self.insert(tag);
        self
    }

    pub fn contains(self, tag: EqTag) -> bool {
        self.0 & (1 << tag.0) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Lowest-numbered tag, used for canonical ordering.
    pub fn primary(self) -> Option<EqTag> {
        EqTag::all().find(|t| self.contains(*t))
    }

    pub fn iter(self) -> impl Iterator<Item = EqTag> {
        EqTag::all().filter(move |t| self.contains(*t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: VarRef,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
    pub cost: f64,
    /// Equation family enforced by this variable's bounds, if any.
    pub bound_tag: Option<EqTag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub tags: EqTags,
    /// Node, component or storage the row belongs to.
    pub owner: String,
    pub step: Option<usize>,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }

    pub fn has_tag(&self, tag: EqTag) -> bool {
        self.tags.contains(tag)
    }
}

/// Non-fatal finding raised while compiling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompileWarning {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ProgramError {
    #[error("variable {0} declared twice")]
    DuplicateVariable(VarRef),
    #[error("row {row} references undefined variable index {index}")]
    UndefinedVariable { row: usize, index: usize },
    #[error("variable {0} is integer but its kind cannot be")]
    IllegalIntegrality(VarRef),
    #[error("variable {0} has lower bound above upper bound")]
    EmptyDomain(VarRef),
}

/// Minimisation program in standard form with a name map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    pub objective_offset: f64,
    /// Equation families represented by objective terms rather than rows.
    pub objective_tags: EqTags,
    pub warnings: Vec<CompileWarning>,
    index: HashMap<VarRef, usize>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a continuous variable with bounds `[lower, upper]` and zero cost.
    pub fn add_var(&mut self, name: VarRef, lower: f64, upper: f64) -> Result<usize, ProgramError> {
        if self.index.contains_key(&name) {
            return Err(ProgramError::DuplicateVariable(name));
        }
        let idx = self.vars.len();
        self.index.insert(name.clone(), idx);
        self.vars.push(Variable {
            name,
            lower,
            upper,
            integer: false,
            cost: 0.0,
            bound_tag: None,
        });
        Ok(idx)
    }

    pub fn add_integer_var(
        &mut self,
        name: VarRef,
        lower: f64,
        upper: f64,
    ) -> Result<usize, ProgramError> {
        if !name.kind.is_discrete() {
            return Err(ProgramError::IllegalIntegrality(name));
        }
        let idx = self.add_var(name, lower, upper)?;
        self.vars[idx].integer = true;
        Ok(idx)
    }

    pub fn var_index(&self, name: &VarRef) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, kind: VarKind, owner: &str, index: Option<usize>) -> Option<usize> {
        self.index.get(&VarRef::new(kind, owner, index)).copied()
    }

    pub fn add_cost(&mut self, var: usize, cost: f64) {
        self.vars[var].cost += cost;
    }

    /// Appends a row with entries sorted by variable, merging duplicates and dropping exact zeros.
    pub fn add_row(
        &mut self,
        tags: EqTags,
        owner: &str,
        step: Option<usize>,
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        let mut coeffs = coeffs;
        coeffs.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (j, a) in coeffs {
            match merged.last_mut() {
                Some(e) if e.0 == j => e.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Row {
            tags,
            owner: owner.to_string(),
            step,
            coeffs: merged,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn is_mip(&self) -> bool {
        self.vars.iter().any(|v| v.integer)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset
            + self
                .vars
                .iter()
                .zip(x)
                .map(|(v, xi)| v.cost * xi)
                .sum::<f64>()
    }

    /// Largest row violation of `x`.
    pub fn max_row_violation(&self, x: &[f64]) -> f64 {
        self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max)
    }

    pub fn max_bound_violation(&self, x: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(x)
            .map(|(v, &xi)| (v.lower - xi).max(xi - v.upper).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn max_integrality_violation(&self, x: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(x)
            .filter(|(v, _)| v.integer)
            .map(|(_, &xi)| (xi - xi.round()).abs())
            .fold(0.0, f64::max)
    }

    /// Reorders rows by (primary tag, owner, step), keeping emission order within ties.
    pub fn canonicalize(&mut self) {
        for row in &mut self.rows {
            // −0 + 0 = +0
            row.rhs += 0.0;
        }
        self.rows.sort_by(|a, b| {
            let ka = (a.tags.primary(), &a.owner, a.step);
            let kb = (b.tags.primary(), &b.owner, b.step);
            ka.cmp(&kb)
        });
    }

    /// Checks the structural invariants of the program.
    pub fn check(&self) -> Result<(), ProgramError> {
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(&(j, _)) = row.coeffs.iter().find(|&&(j, _)| j >= self.vars.len()) {
                return Err(ProgramError::UndefinedVariable { row: r, index: j });
            }
        }
        for v in &self.vars {
            if v.integer && !v.name.kind.is_discrete() {
                return Err(ProgramError::IllegalIntegrality(v.name.clone()));
            }
            if v.lower > v.upper {
                return Err(ProgramError::EmptyDomain(v.name.clone()));
            }
        }
        Ok(())
    }

    /// Rows whose tag set contains `tag`.
    pub fn rows_tagged(&self, tag: EqTag) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.has_tag(tag))
    }

    /// Every equation family present as a row tag, a bound tag or an objective tag.
    pub fn covered_tags(&self) -> EqTags {
        let mut tags = self.objective_tags;
        for r in &self.rows {
            for t in r.tags.iter() {
                tags.insert(t);
            }
        }
        for v in &self.vars {
            if let Some(t) = v.bound_tag {
                tags.insert(t);
            }
        }
        tags
    }

    /// Renders the program in CPLEX LP format.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::new();
        out.push_str("\\ exported by esopt\nMinimize\n obj:");
        let mut any = false;
        for v in &self.vars {
            if v.cost != 0.0 {
                write_term(&mut out, v.cost, &v.name.lp_name(), !any);
                any = true;
            }
        }
        if self.objective_offset != 0.0 {
            let _ = write!(
                out,
                " {} {}",
                sign_of(self.objective_offset),
                fmt_num(self.objective_offset.abs())
            );
        } else if !any {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for (r, row) in self.rows.iter().enumerate() {
            let tag = row
                .tags
                .primary()
                .map(|t| t.to_string())
                .unwrap_or_else(|| "R".into());
            let _ = write!(out, " r{}_{}:", r + 1, tag);
            if row.coeffs.is_empty() {
                out.push_str(" 0");
            }
            for (k, &(j, a)) in row.coeffs.iter().enumerate() {
                write_term(&mut out, a, &self.vars[j].name.lp_name(), k == 0);
            }
            let _ = writeln!(out, " {} {}", row.sense.symbol(), fmt_num(row.rhs));
        }
        out.push_str("Bounds\n");
        for v in &self.vars {
            let name = v.name.lp_name();
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (false, false) => {
                    let _ = writeln!(out, " {} free", name);
                }
                (true, true) => {
                    let _ = writeln!(
                        out,
                        " {} <= {} <= {}",
                        fmt_num(v.lower),
                        name,
                        fmt_num(v.upper)
                    );
                }
                (true, false) => {
                    if v.lower != 0.0 {
                        let _ = writeln!(out, " {} >= {}", name, fmt_num(v.lower));
                    }
                }
                (false, true) => {
                    let _ = writeln!(out, " -inf <= {} <= {}", name, fmt_num(v.upper));
                }
            }
        }
        let ints: Vec<String> = self
            .vars
            .iter()
            .filter(|v| v.integer)
            .map(|v| v.name.lp_name())
            .collect();
        if !ints.is_empty() {
            out.push_str("General\n");
            for name in ints {
                let _ = writeln!(out, " {}", name);
            }
        }
        out.push_str("End\n");
        out
    }
}

fn sign_of(a: f64) -> char {
    if a < 0.0 {
        '-'
    } else {
        '+'
    }
}

fn fmt_num(a: f64) -> String {
    format!("{}", a + 0.0)
}

/// Longest expression line before a term wraps; LP readers cap line length.
const LP_LINE: usize = 255;

fn write_term(out: &mut String, a: f64, name: &str, first: bool) {
    let line = out.len() - out.rfind('\n').map_or(0, |i| i + 1);
    if line + name.len() + 28 > LP_LINE {
        out.push_str("\n ");
    }
    if first && a >= 0.0 {
        let _ = write!(out, " {} {}", fmt_num(a), name);
    } else {
        let _ = write!(out, " {} {} {}", sign_of(a), fmt_num(a.abs()), name);
    }
}
