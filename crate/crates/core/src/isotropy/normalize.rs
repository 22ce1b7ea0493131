use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::exact::{gcd_all, lcm_denominators, squarefree_part, Int, MathError, Rat};

/// A ternary `a x² + b y² + c z²` rewritten with square-free, pairwise coprime
/// coefficients. Original coordinates are `x_i = scale_i · X_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedTernary {
    pub coeffs: [Int; 3],
    pub scale: [Rat; 3],
}

impl NormalizedTernary {
    /// Primitive integer zero of the original form from a zero of the
    /// normalized one; signs are preserved.
    pub fn back_map(&self, w: &[Int]) -> Vec<Int> {
        let v: Vec<Rat> = (0..3)
            .map(|i| &self.scale[i] * Rat::from_integer(w[i].clone()))
            .collect();
        crate::exact::primitive_integer(&v)
    }

    /// Max-norm bound on the back-mapped image of a Holzer-bounded zero
    /// (`|X| ≤ √|bc|`, `|Y| ≤ √|ac|`, `|Z| ≤ √|ab|`); `None` beyond `u64`.
    pub fn original_bound(&self) -> Option<u64> {
        let l = lcm_denominators(self.scale.iter());
        let mut bound = Int::from(0);
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let h = (&self.coeffs[j] * &self.coeffs[k]).magnitude().sqrt();
            let s = &self.scale[i] * Rat::from_integer(l.clone());
            let b = s.to_integer().magnitude() * h;
            bound = bound.max(Int::from(b));
        }
        bound.to_u64()
    }
}

pub fn normalize_ternary(a: &Int, b: &Int, c: &Int) -> Result<NormalizedTernary, MathError> {
    let mut coeffs = [a.clone(), b.clone(), c.clone()];
    let mut scale = [Rat::one(), Rat::one(), Rat::one()];
    if coeffs.iter().any(|x| x == &Int::from(0)) {
        return Err(MathError::Domain("ternary coefficients must be nonzero"));
    }
    loop {
        let g = gcd_all(coeffs.iter());
        for x in coeffs.iter_mut() {
            *x /= &g;
        }
        for i in 0..3 {
            let (s, r) = squarefree_part(&coeffs[i])?;
            coeffs[i] = s;
            scale[i] /= Rat::from_integer(r);
        }
        // g·a' x² + g·b' y² + c z² = 0 with z = g·Z becomes a' x² + b' y² + g·c Z² = 0.
        let pair = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
            .into_iter()
            .find(|&(i, j, _)| !coeffs[i].gcd(&coeffs[j]).is_one());
        let Some((i, j, k)) = pair else {
            break;
        };
        let g = coeffs[i].gcd(&coeffs[j]);
        coeffs[i] /= &g;
        coeffs[j] /= &g;
        coeffs[k] *= &g;
        scale[k] *= Rat::from_integer(g);
    }
    Ok(NormalizedTernary { coeffs, scale })
}
