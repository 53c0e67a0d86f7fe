//! Intersection complexes of reflexive modules: the alternating
//! dualize-and-truncate recursion, its stopping index, and the verification
//! report (H^0 recovery, codimension bounds, perversity, stability).

use crate::complex::{resolution_complex, FreeComplex};
use crate::error::{Error, Result};
use crate::ideal::Codim;
use crate::modules::{default_panel, presentations_equivalent, FPModule};
use crate::perversity::is_m_perverse;
use crate::torus::CharacterTorus;

#[derive(Debug, Clone)]
pub struct ICInput {
    pub module: FPModule,
    pub ambient_dim: usize,
    pub torus_mode: bool,
}

impl ICInput {
    pub fn new(module: FPModule, ambient_dim: usize, torus_mode: bool) -> Result<Self> {
        if module.ring.n() != ambient_dim {
            return Err(Error::RingMismatch(format!(
                "module ring has {} variables, ambient dimension is {}",
                module.ring.n(),
                ambient_dim
            )));
        }
        if torus_mode && ambient_dim % 2 != 0 {
            return Err(Error::InvalidInput("torus mode needs even ambient dimension".into()));
        }
        Ok(ICInput { module, ambient_dim, torus_mode })
    }

    fn unit(&self) -> Option<crate::poly::Poly> {
        if self.torus_mode {
            let mut u = crate::poly::Poly::one(&self.module.ring);
            for i in 0..self.ambient_dim {
                u = u.mul(&crate::poly::Poly::var(&self.module.ring, i));
            }
            Some(u)
        } else {
            None
        }
    }
}

/// Smallest odd ell with 2*ell + 1 >= n: ell = 2*ceil((n+1)/4) - 1.
pub fn ell(n: usize) -> usize {
    2 * (n + 1).div_ceil(4) - 1
}

fn resolution_bound(ring_vars: usize) -> usize {
    ring_vars + 3
}

/// The tower F_0 = RHom(F, R), F_n = (truncate to degrees <= n-1 of the
/// dual of F_{n-1}); returns F_0 ..= F_top.
pub fn ic_tower(module: &FPModule, top: usize) -> Result<Vec<FreeComplex>> {
    let bound = resolution_bound(module.ring.n());
    let mut tower = Vec::with_capacity(top + 1);
    tower.push(resolution_complex(module, 0, bound)?.dual().minimize());
    for n in 1..=top {
        let prev: &FreeComplex = tower.last().unwrap();
        tower.push(prev.dual().truncate_leq(n as i32 - 1)?.minimize());
    }
    Ok(tower)
}

/// IC(F) = F_ell for the recursion above. Checks the defining bounds on the
/// result: H^0 recovers the module and codim Supp H^i >= 2i + 1 for i >= 1.
pub fn intersection_complex(inp: &ICInput) -> Result<FreeComplex> {
    if !inp.module.is_reflexive()? {
        return Err(Error::NotReflexive);
    }
    let ic = ic_tower(&inp.module, ell(inp.ambient_dim))?
        .pop()
        .unwrap();
    let unit = inp.unit();
    let profile = ic.support_profile(unit.as_ref())?;
    for (&i, &(_, codim)) in profile.entries.iter().map(|(d, e)| (d, e)) {
        let required = if i >= 1 { 2 * i64::from(i) + 1 } else { 0 };
        if !codim.at_least(required) {
            return Err(Error::PreconditionFailed(format!(
                "intersection complex violates codim bound in degree {}",
                i
            )));
        }
    }
    let panel = default_panel(inp.ambient_dim);
    if !presentations_equivalent(&ic.cohomology_module(0), &inp.module, &panel)? {
        return Err(Error::PreconditionFailed(
            "intersection complex does not recover the module in degree 0".into(),
        ));
    }
    Ok(ic)
}

#[derive(Debug, Clone)]
pub struct CodimBound {
    pub i: i32,
    pub codim: Codim,
    pub required: i64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct ICReport {
    pub h0_matches: bool,
    pub codim_bounds: Vec<CodimBound>,
    pub m_perverse: bool,
    pub dual_h0_matches: bool,
    pub dual_codim_ok: bool,
    pub stable_under_ell_increase: bool,
}

impl ICReport {
    pub fn all_pass(&self) -> bool {
        self.h0_matches
            && self.codim_bounds.iter().all(|b| b.ok)
            && self.m_perverse
            && self.dual_h0_matches
            && self.dual_codim_ok
            && self.stable_under_ell_increase
    }
}

fn codim_bounds(
    c: &FreeComplex,
    unit: Option<&crate::poly::Poly>,
) -> Result<(Vec<CodimBound>, bool)> {
    let profile = c.support_profile(unit)?;
    let mut out = Vec::new();
    let mut all_ok = true;
    for (&i, &(_, codim)) in profile.entries.iter().map(|(d, e)| (d, e)) {
        if i < 1 || codim == Codim::Infinity {
            continue;
        }
        let required = 2 * i64::from(i) + 1;
        let ok = codim.at_least(required);
        all_ok &= ok;
        out.push(CodimBound { i, codim, required, ok });
    }
    Ok((out, all_ok))
}

pub fn ic_verify(inp: &ICInput) -> Result<ICReport> {
    ic_verify_with_ell(inp, ell(inp.ambient_dim))
}

pub fn ic_verify_with_ell(inp: &ICInput, ell_used: usize) -> Result<ICReport> {
    if !inp.module.is_reflexive()? {
        return Err(Error::NotReflexive);
    }
    let tower = ic_tower(&inp.module, ell_used + 2)?;
    let ic = tower[ell_used].clone();
    let ic_next = &tower[ell_used + 2];
    let unit = inp.unit();
    let panel = default_panel(inp.ambient_dim);

    let h0_matches = presentations_equivalent(&ic.cohomology_module(0), &inp.module, &panel)?;
    let (bounds, _) = codim_bounds(&ic, unit.as_ref())?;
    let torus_for_perv = if inp.torus_mode {
        Some(CharacterTorus::new(inp.ambient_dim / 2, inp.module.ring.order)?)
    } else {
        None
    };
    let m_perverse = is_m_perverse(&ic, torus_for_perv.as_ref())?;

    let dual_ic = ic.dual();
    let dual_h0_matches = presentations_equivalent(
        &dual_ic.cohomology_module(0),
        &inp.module.dual().module,
        &panel,
    )?;
    let (_, dual_codim_ok) = codim_bounds(&dual_ic, unit.as_ref())?;

    let mut stable = true;
    let lo = ic.lo.min(ic_next.lo);
    let hi = ic.hi.max(ic_next.hi);
    for d in lo..=hi {
        if !presentations_equivalent(
            &ic.cohomology_module(d),
            &ic_next.cohomology_module(d),
            &panel,
        )? {
            stable = false;
        }
    }

    Ok(ICReport {
        h0_matches,
        codim_bounds: bounds,
        m_perverse,
        dual_h0_matches,
        dual_codim_ok,
        stable_under_ell_increase: stable,
    })
}
