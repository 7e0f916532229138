//! Zero-order Takagi-Sugeno controller: input scaling, triangular N/Z/P
//! fuzzification, three diagonal min-rules, and singleton center-of-gravity
//! defuzzification, plus the ordering repair applied to raw search vectors.

use crate::Vec9;

/// Minimum gap between adjacent modal values. The triangle formulas divide by
/// the gaps, so coincident values would be singular.
pub const EPS_GAP: f64 = 1e-3;

/// Total activation below this counts as "no rule fired"; the output is then
/// zero, the neutral command for the ruleless corner inputs.
pub const EPS_ACT: f64 = 1e-9;

/// Modal values of the N/Z/P triangles over one normalized input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipTriple {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl MembershipTriple {
    /// Strictly ordered with both gaps at least [`EPS_GAP`], inside [-1, 1].
    pub fn is_valid(&self) -> bool {
        self.a1 >= -1.0
            && self.a3 <= 1.0
            && self.a2 - self.a1 >= EPS_GAP
            && self.a3 - self.a2 >= EPS_GAP
    }
}

/// Fixed input/output scaling. These are configuration, not search
/// dimensions: `ge` and `gde` map plant-unit error and error rate into the
/// normalized [-1, 1] universe, `gu` maps the normalized output to actuator
/// units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub ge: f64,
    pub gde: f64,
    pub gu: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Gains {
            ge: 1.25,
            gde: 0.45,
            gu: 45.0,
        }
    }
}

/// Decoded controller: triangles for e and de, output singletons, gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    pub e_mf: MembershipTriple,
    pub de_mf: MembershipTriple,
    pub singletons: [f64; 3],
    pub gains: Gains,
}

impl ControllerParams {
    /// Reports the first violated invariant, if any; used to gate parameter
    /// files before they reach a simulation.
    // Negated comparisons are deliberate: they also reject NaN fields.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), String> {
        let triples = [("a", &self.e_mf), ("b", &self.de_mf)];
        for (name, t) in triples {
            if !(t.a1 >= -1.0 && t.a3 <= 1.0) {
                return Err(format!("{name}1..{name}3 must lie in [-1, 1]"));
            }
            if !(t.a2 - t.a1 >= EPS_GAP) {
                return Err(format!("{name}2 - {name}1 must be at least {EPS_GAP}"));
            }
            if !(t.a3 - t.a2 >= EPS_GAP) {
                return Err(format!("{name}3 - {name}2 must be at least {EPS_GAP}"));
            }
        }
        let [c1, c2, c3] = self.singletons;
        if !(c1 >= -1.0 && c3 <= 1.0) {
            return Err("c1..c3 must lie in [-1, 1]".into());
        }
        if !(c2 - c1 >= EPS_GAP) {
            return Err(format!("c2 - c1 must be at least {EPS_GAP}"));
        }
        if !(c3 - c2 >= EPS_GAP) {
            return Err(format!("c3 - c2 must be at least {EPS_GAP}"));
        }
        for (name, g) in [("Ge", self.gains.ge), ("Gde", self.gains.gde), ("Gu", self.gains.gu)] {
            if !(g > 0.0 && g.is_finite()) {
                return Err(format!("{name} must be a positive finite number"));
            }
        }
        Ok(())
    }

    /// The nine tuned values in search-vector order.
    pub fn to_vector(&self) -> Vec9 {
        [
            self.e_mf.a1,
            self.e_mf.a2,
            self.e_mf.a3,
            self.de_mf.a1,
            self.de_mf.a2,
            self.de_mf.a3,
            self.singletons[0],
            self.singletons[1],
            self.singletons[2],
        ]
    }
}

/// Grades of one input against the N/Z/P terms; always sums to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipGrades {
    pub mu_n: f64,
    pub mu_z: f64,
    pub mu_p: f64,
}

/// Rule activations for the three diagonal rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activations {
    pub alpha_n: f64,
    pub alpha_z: f64,
    pub alpha_p: f64,
}

/// Triangular fuzzification with flat tails, so inputs outside [-1, 1] simply
/// saturate. Partition of unity holds for every real `x`.
pub fn fuzzify(x: f64, t: &MembershipTriple) -> MembershipGrades {
    let MembershipTriple { a1, a2, a3 } = *t;
    let mu_n = if x < a1 {
        1.0
    } else if x < a2 {
        (a2 - x) / (a2 - a1)
    } else {
        0.0
    };
    let mu_z = if (a1..a2).contains(&x) {
        (x - a1) / (a2 - a1)
    } else if (a2..a3).contains(&x) {
        (a3 - x) / (a3 - a2)
    } else {
        0.0
    };
    let mu_p = if x < a2 {
        0.0
    } else if x < a3 {
        (x - a2) / (a3 - a2)
    } else {
        1.0
    };
    MembershipGrades { mu_n, mu_z, mu_p }
}

/// Min-inference over the diagonal rule base: N∧N→N, Z∧Z→Z, P∧P→P. Opposite
/// corners activate nothing.
pub fn infer(e: &MembershipGrades, de: &MembershipGrades) -> Activations {
    Activations {
        alpha_n: e.mu_n.min(de.mu_n),
        alpha_z: e.mu_z.min(de.mu_z),
        alpha_p: e.mu_p.min(de.mu_p),
    }
}

/// Activation-weighted mean of the singletons; zero when (almost) nothing
/// fired.
pub fn defuzzify(act: &Activations, singletons: [f64; 3]) -> f64 {
    let total = act.alpha_n + act.alpha_z + act.alpha_p;
    if total < EPS_ACT {
        return 0.0;
    }
    (act.alpha_n * singletons[0] + act.alpha_z * singletons[1] + act.alpha_p * singletons[2])
        / total
}

/// Crisp control law: scale the inputs into the normalized universe, run the
/// fuzzy stages, scale the output.
pub fn control(e: f64, de: f64, p: &ControllerParams) -> f64 {
    let e_n = (p.gains.ge * e).clamp(-1.0, 1.0);
    let de_n = (p.gains.gde * de).clamp(-1.0, 1.0);
    let act = infer(&fuzzify(e_n, &p.e_mf), &fuzzify(de_n, &p.de_mf));
    p.gains.gu * defuzzify(&act, p.singletons)
}

/// Splits a repaired search vector: positions 0-2 are the e triangle, 3-5 the
/// de triangle, 6-8 the singletons.
pub fn decode(v: &Vec9, gains: Gains) -> ControllerParams {
    ControllerParams {
        e_mf: MembershipTriple {
            a1: v[0],
            a2: v[1],
            a3: v[2],
        },
        de_mf: MembershipTriple {
            a1: v[3],
            a2: v[4],
            a3: v[5],
        },
        singletons: [v[6], v[7], v[8]],
        gains,
    }
}

// Slightly more than EPS_GAP so repaired gaps still clear the invariant after
// float rounding, and so repair(repair(v)) == repair(v) bitwise (the second
// pass takes the early exit).
const PAD: f64 = EPS_GAP * (1.0 + 1e-6);

/// Restores the strict-ordering invariant of each tuned triple: sort, then
/// push adjacent values apart symmetrically until both gaps reach at least
/// [`EPS_GAP`], shifting back inside [-1, 1] if a push ran over the boundary.
/// Idempotent, and a vector already satisfying the invariant is returned
/// unchanged.
pub fn repair(raw: Vec9) -> Vec9 {
    let mut out = raw;
    for k in 0..3 {
        let t = repair_triple([out[3 * k], out[3 * k + 1], out[3 * k + 2]]);
        out[3 * k] = t[0];
        out[3 * k + 1] = t[1];
        out[3 * k + 2] = t[2];
    }
    out
}

fn repair_triple(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(f64::total_cmp);
    if v[0] >= -1.0 && v[2] <= 1.0 && v[1] - v[0] >= EPS_GAP && v[2] - v[1] >= EPS_GAP {
        return v;
    }
    // Pool-adjacent-violators on z_i = v_i - i*PAD: pooling neighbors to
    // their mean is exactly the symmetric push-apart, and the result is
    // non-decreasing in z, i.e. has gaps >= PAD in v.
    let z = [v[0], v[1] - PAD, v[2] - 2.0 * PAD];
    let mut blocks: [(f64, usize); 3] = [(0.0, 0); 3];
    let mut nblocks = 0;
    for &zi in &z {
        blocks[nblocks] = (zi, 1);
        nblocks += 1;
        while nblocks >= 2 && blocks[nblocks - 2].0 > blocks[nblocks - 1].0 {
            let (m1, n1) = blocks[nblocks - 2];
            let (m2, n2) = blocks[nblocks - 1];
            let n = n1 + n2;
            blocks[nblocks - 2] = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
            nblocks -= 1;
        }
    }
    let mut w = [0.0; 3];
    let mut i = 0;
    for &(m, n) in &blocks[..nblocks] {
        for _ in 0..n {
            w[i] = m + i as f64 * PAD;
            i += 1;
        }
    }
    // Boundary handling: shift down from +1 first, then anchor at -1 and
    // cascade, which fits because 2*PAD is far below the box width.
    if w[2] > 1.0 {
        let shift = w[2] - 1.0;
        for x in &mut w {
            *x -= shift;
        }
    }
    if w[0] < -1.0 {
        w[0] = -1.0;
        w[1] = w[1].max(-1.0 + PAD);
        w[2] = w[2].max(w[1] + PAD);
    }
    w
}
