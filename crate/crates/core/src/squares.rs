//! Simple squares: 2x2 arrays `[[a, b], [c, d]]` of simple vectors whose
//! columns share a sheet of one foliation, whose rows share a sheet of the
//! other, and whose total sum is again simple.
//!
//! Any three entries determine the fourth. In the generic case the ray of `d`
//! is the second cross ray of `b` and `c` (the first one is the ray of `a`),
//! and its scale is the unique `t` making `a + b + c + t u` simple. Since `u`
//! is simple the quadratic term drops out and each quadric gives one linear
//! equation in `t`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::{cross_rays_from_normals, normal_space, same_sheet};
use crate::ratlin::{solve_linear, Matrix, Scalar, Subspace, Vector};
use crate::tensor_space::TensorSpaceInstance;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Square {
    pub a: Vector,
    pub b: Vector,
    pub c: Vector,
    pub d: Vector,
}

impl Square {
    pub fn new(a: Vector, b: Vector, c: Vector, d: Vector) -> Self {
        Square { a, b, c, d }
    }

    pub fn scale_first_row(&self, s: &Scalar) -> Square {
        Square::new(self.a.scale(s), self.b.scale(s), self.c.clone(), self.d.clone())
    }

    pub fn scale_first_column(&self, s: &Scalar) -> Square {
        Square::new(self.a.scale(s), self.b.clone(), self.c.scale(s), self.d.clone())
    }
}

/// How a completion was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SquareCase {
    /// `a, b, c` span three distinct rays; `d = t u` with `u` the canonical
    /// generator of the fourth ray.
    Generic { t: Scalar },
    /// `c = lambda a`, so `d = lambda b`.
    ColumnScaled { lambda: Scalar },
    /// `b = mu a`, so `d = mu c`.
    RowScaled { mu: Scalar },
    /// `c = lambda a` and `b = mu a`, so `d = lambda mu a`.
    DoublyScaled { lambda: Scalar, mu: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Completion {
    pub d: Vector,
    #[serde(flatten)]
    pub case: SquareCase,
}

impl Completion {
    /// The solved scale `t` of the generic case.
    pub fn scale(&self) -> Option<&Scalar> {
        match &self.case {
            SquareCase::Generic { t } => Some(t),
            _ => None,
        }
    }
}

/// The fourth corner `d` of the square `[[a, b], [c, d]]`.
///
/// `a` must be nonzero; `a, c` share a sheet of one foliation and `a, b` a
/// sheet of the other. A zero `b` or `c` is read as the scaled case with
/// factor zero.
pub fn complete_square(inst: &TensorSpaceInstance, a: &Vector, b: &Vector, c: &Vector) -> Result<Completion> {
    let dim = inst.dim();
    for v in [a, b, c] {
        v.check_len(dim)?;
    }
    if a.is_zero() {
        return Err(Error::PreconditionViolated("corner a must be nonzero"));
    }
    for v in [a, b, c] {
        if !inst.is_simple(v)? {
            return Err(Error::NotSimple);
        }
    }

    let lambda = c.ratio_to(a);
    let mu = b.ratio_to(a);
    match (lambda, mu) {
        (Some(lambda), Some(mu)) => {
            let d = a.scale(&(&lambda * &mu));
            Ok(Completion { d, case: SquareCase::DoublyScaled { lambda, mu } })
        }
        (Some(lambda), None) => {
            if !same_sheet(inst, a, b)? {
                return Err(Error::PreconditionViolated("a and b must share a sheet"));
            }
            Ok(Completion { d: b.scale(&lambda), case: SquareCase::ColumnScaled { lambda } })
        }
        (None, Some(mu)) => {
            if !same_sheet(inst, a, c)? {
                return Err(Error::PreconditionViolated("a and c must share a sheet"));
            }
            Ok(Completion { d: c.scale(&mu), case: SquareCase::RowScaled { mu } })
        }
        (None, None) => complete_generic(inst, a, b, c),
    }
}

fn complete_generic(inst: &TensorSpaceInstance, a: &Vector, b: &Vector, c: &Vector) -> Result<Completion> {
    if !same_sheet(inst, a, b)? || !same_sheet(inst, a, c)? {
        return Err(Error::PreconditionViolated("a must share a sheet with both b and c"));
    }
    if same_sheet(inst, b, c)? {
        return Err(Error::PreconditionViolated("b and c must not share a sheet"));
    }
    complete_with_normals(inst, a, b, c, &normal_space(inst, b)?, &normal_space(inst, c)?, true)
}

/// Generic completion without precondition checks, given the normal spaces
/// at `b` and `c`.
///
/// With `verify` off, the first quadric that pins down each unknown is
/// trusted and the remaining equations are not checked.
pub(crate) fn complete_with_normals(
    inst: &TensorSpaceInstance,
    a: &Vector,
    b: &Vector,
    c: &Vector,
    nb: &Subspace,
    nc: &Subspace,
    verify: bool,
) -> Result<Completion> {
    let (r1, r2) = cross_rays_from_normals(inst, nb, nc, verify)?;
    let ray = match (r1.contains(a), r2.contains(a)) {
        (true, false) => r2,
        (false, true) => r1,
        _ => return Err(Error::Inconsistent),
    };
    let u = ray.generator();
    let s = &(a + b) + c;

    // Q_k(s + t u) = Q_k(s) + 2 t B_k(s, u) = 0 for every k.
    inst.record_oracle_call();
    let two = Scalar::from(2);
    let mut coeffs = Vec::with_capacity(inst.quadrics().len());
    let mut rhs = Vec::with_capacity(inst.quadrics().len());
    for q in inst.quadrics() {
        let gs = q.doubled_polar_functional(&s);
        let coeff = &two * &u.dot(&gs);
        if !verify && !coeff.is_zero() {
            let t = -s.dot(&gs) / coeff;
            return Ok(Completion { d: u.scale(&t), case: SquareCase::Generic { t } });
        }
        coeffs.push(Vector::new(vec![coeff]));
        rhs.push(-s.dot(&gs));
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(if rhs.iter().all(Scalar::is_zero) {
            Error::Degenerate("scale of the fourth corner is undetermined")
        } else {
            Error::Inconsistent
        });
    }
    let t = solve_linear(&Matrix::from_rows(1, &coeffs), &Vector::new(rhs))?[0].clone();
    Ok(Completion { d: u.scale(&t), case: SquareCase::Generic { t } })
}

/// Whether `sq` is a simple square, including the scaled special forms.
pub fn is_square(inst: &TensorSpaceInstance, sq: &Square) -> Result<bool> {
    let Square { a, b, c, d } = sq;
    for v in [a, b, c, d] {
        v.check_len(inst.dim())?;
        if v.is_zero() || !inst.is_simple(v)? {
            return Ok(false);
        }
    }
    let ok = match (c.ratio_to(a), b.ratio_to(a)) {
        (Some(lambda), Some(mu)) => *d == a.scale(&(lambda * mu)),
        (Some(lambda), None) => *d == b.scale(&lambda) && same_sheet(inst, a, b)?,
        (None, Some(mu)) => *d == c.scale(&mu) && same_sheet(inst, a, c)?,
        (None, None) => {
            same_sheet(inst, a, b)?
                && same_sheet(inst, a, c)?
                && same_sheet(inst, b, d)?
                && same_sheet(inst, c, d)?
                && !same_sheet(inst, b, c)?
                && !same_sheet(inst, a, d)?
                && inst.is_simple(&(&(a + b) + &(c + d)))?
        }
    };
    Ok(ok)
}
