//! Trace Fixpoint Logic formulae: abstract syntax, positive normal form,
//! Fischer-Ladner closure and the natural syntactic fragments. The plain
//! (causality-oblivious) modalities are abbreviations expanded at parse
//! time; [`plain_view`] recognises the expansion pattern wherever plainness
//! matters again.

mod parse;

pub use parse::{parse_formula, print_formula};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::tsi::Label;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Tt,
    Ff,
    Var(String),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    DiaC(Label, Box<Formula>),
    DiaNc(Label, Box<Formula>),
    BoxC(Label, Box<Formula>),
    BoxNc(Label, Box<Formula>),
    DiaCo(Box<Formula>),
    BoxCo(Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Formula {
        Neg(Box::new(a))
    }

    pub fn dia_c(l: &str, a: Formula) -> Formula {
        DiaC(Label(l.into()), Box::new(a))
    }

    pub fn dia_nc(l: &str, a: Formula) -> Formula {
        DiaNc(Label(l.into()), Box::new(a))
    }

    pub fn box_c(l: &str, a: Formula) -> Formula {
        BoxC(Label(l.into()), Box::new(a))
    }

    pub fn box_nc(l: &str, a: Formula) -> Formula {
        BoxNc(Label(l.into()), Box::new(a))
    }

    /// The plain diamond: causal-or-concurrent successor.
    pub fn dia(l: &str, a: Formula) -> Formula {
        Formula::or(Formula::dia_c(l, a.clone()), Formula::dia_nc(l, a))
    }

    /// The plain box.
    pub fn boxm(l: &str, a: Formula) -> Formula {
        Formula::and(Formula::box_c(l, a.clone()), Formula::box_nc(l, a))
    }

    pub fn dia_co(a: Formula) -> Formula {
        DiaCo(Box::new(a))
    }

    pub fn box_co(a: Formula) -> Formula {
        BoxCo(Box::new(a))
    }

    pub fn mu(v: &str, a: Formula) -> Formula {
        Mu(v.into(), Box::new(a))
    }

    pub fn nu(v: &str, a: Formula) -> Formula {
        Nu(v.into(), Box::new(a))
    }

    pub fn size(&self) -> usize {
        match self {
            Tt | Ff | Var(_) => 1,
            Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a) | BoxCo(a)
            | Mu(_, a) | Nu(_, a) => 1 + a.size(),
            And(a, b) | Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Var(z) => {
                    if !bound.iter().any(|b| b == z) {
                        out.insert(z.clone());
                    }
                }
                Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a)
                | BoxCo(a) => walk(a, bound, out),
                And(a, b) | Or(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Mu(z, a) | Nu(z, a) => {
                    bound.push(z.clone());
                    walk(a, bound, out);
                    bound.pop();
                }
                Tt | Ff => {}
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Labels occurring in modalities.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        fn walk(f: &Formula, out: &mut BTreeSet<Label>) {
            match f {
                DiaC(l, a) | DiaNc(l, a) | BoxC(l, a) | BoxNc(l, a) => {
                    out.insert(l.clone());
                    walk(a, out);
                }
                Neg(a) | DiaCo(a) | BoxCo(a) | Mu(_, a) | Nu(_, a) => walk(a, out),
                And(a, b) | Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Tt | Ff | Var(_) => {}
            }
        }
        walk(self, &mut out);
        out
    }

    /// Checks that every bound variable occurs under an even number of
    /// negations inside its binder, the monotonicity requirement.
    pub fn check_polarity(&self) -> Result<(), String> {
        fn walk(f: &Formula, neg: bool, bound: &BTreeMap<String, bool>) -> Result<(), String> {
            match f {
                Var(z) => match bound.get(z) {
                    // a bound variable must be reached with the polarity it
                    // was bound at (evenly many negations in between)
                    Some(&at) if at != neg => Err(format!("{z} occurs under an odd number of negations")),
                    _ => Ok(()),
                },
                Neg(a) => walk(a, !neg, bound),
                And(a, b) | Or(a, b) => {
                    walk(a, neg, bound)?;
                    walk(b, neg, bound)
                }
                DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a) | BoxCo(a) => {
                    walk(a, neg, bound)
                }
                Mu(z, a) | Nu(z, a) => {
                    let mut b2 = bound.clone();
                    b2.insert(z.clone(), neg);
                    walk(a, neg, &b2)
                }
                Tt | Ff => Ok(()),
            }
        }
        walk(self, false, &BTreeMap::new())
    }

    /// Renames bound variables so that every binder introduces a distinct
    /// name (fresh names avoid all names in the formula).
    pub fn distinct_binders(&self) -> Formula {
        let mut taken: BTreeSet<String> = self.free_vars();
        fn all_bound(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Mu(z, a) | Nu(z, a) => {
                    out.insert(z.clone());
                    all_bound(a, out);
                }
                Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a)
                | BoxCo(a) => all_bound(a, out),
                And(a, b) | Or(a, b) => {
                    all_bound(a, out);
                    all_bound(b, out);
                }
                _ => {}
            }
        }
        all_bound(self, &mut taken);

        fn fresh(base: &str, taken: &mut BTreeSet<String>, used: &mut BTreeSet<String>) -> String {
            if !used.contains(base) {
                used.insert(base.to_string());
                return base.to_string();
            }
            let mut i = 2;
            loop {
                let cand = format!("{base}_{i}");
                if !taken.contains(&cand) && !used.contains(&cand) {
                    used.insert(cand.clone());
                    return cand;
                }
                i += 1;
            }
        }

        fn walk(
            f: &Formula,
            env: &BTreeMap<String, String>,
            taken: &mut BTreeSet<String>,
            used: &mut BTreeSet<String>,
        ) -> Formula {
            match f {
                Var(z) => Var(env.get(z).cloned().unwrap_or_else(|| z.clone())),
                Neg(a) => Formula::neg(walk(a, env, taken, used)),
                And(a, b) => Formula::and(walk(a, env, taken, used), walk(b, env, taken, used)),
                Or(a, b) => Formula::or(walk(a, env, taken, used), walk(b, env, taken, used)),
                DiaC(l, a) => DiaC(l.clone(), Box::new(walk(a, env, taken, used))),
                DiaNc(l, a) => DiaNc(l.clone(), Box::new(walk(a, env, taken, used))),
                BoxC(l, a) => BoxC(l.clone(), Box::new(walk(a, env, taken, used))),
                BoxNc(l, a) => BoxNc(l.clone(), Box::new(walk(a, env, taken, used))),
                DiaCo(a) => Formula::dia_co(walk(a, env, taken, used)),
                BoxCo(a) => Formula::box_co(walk(a, env, taken, used)),
                Mu(z, a) => {
                    let name = fresh(z, taken, used);
                    let mut env2 = env.clone();
                    env2.insert(z.clone(), name.clone());
                    Mu(name, Box::new(walk(a, &env2, taken, used)))
                }
                Nu(z, a) => {
                    let name = fresh(z, taken, used);
                    let mut env2 = env.clone();
                    env2.insert(z.clone(), name.clone());
                    Nu(name, Box::new(walk(a, &env2, taken, used)))
                }
                Tt => Tt,
                Ff => Ff,
            }
        }
        let mut used: BTreeSet<String> = self.free_vars();
        walk(self, &BTreeMap::new(), &mut taken, &mut used)
    }

    /// Canonical renaming of bound variables for structural comparison up to
    /// alpha equivalence.
    pub fn alpha_normalize(&self) -> Formula {
        fn walk(f: &Formula, env: &BTreeMap<String, String>, counter: &mut usize) -> Formula {
            match f {
                Var(z) => Var(env.get(z).cloned().unwrap_or_else(|| z.clone())),
                Neg(a) => Formula::neg(walk(a, env, counter)),
                And(a, b) => Formula::and(walk(a, env, counter), walk(b, env, counter)),
                Or(a, b) => Formula::or(walk(a, env, counter), walk(b, env, counter)),
                DiaC(l, a) => DiaC(l.clone(), Box::new(walk(a, env, counter))),
                DiaNc(l, a) => DiaNc(l.clone(), Box::new(walk(a, env, counter))),
                BoxC(l, a) => BoxC(l.clone(), Box::new(walk(a, env, counter))),
                BoxNc(l, a) => BoxNc(l.clone(), Box::new(walk(a, env, counter))),
                DiaCo(a) => Formula::dia_co(walk(a, env, counter)),
                BoxCo(a) => Formula::box_co(walk(a, env, counter)),
                Mu(z, a) => {
                    *counter += 1;
                    let name = format!("%{counter}");
                    let mut env2 = env.clone();
                    env2.insert(z.clone(), name.clone());
                    Mu(name, Box::new(walk(a, &env2, counter)))
                }
                Nu(z, a) => {
                    *counter += 1;
                    let name = format!("%{counter}");
                    let mut env2 = env.clone();
                    env2.insert(z.clone(), name.clone());
                    Nu(name, Box::new(walk(a, &env2, counter)))
                }
                Tt => Tt,
                Ff => Ff,
            }
        }
        walk(self, &BTreeMap::new(), &mut 0)
    }
}

/// A plain (HML) modality recognised as its causal/non-causal expansion.
pub enum PlainView<'a> {
    Dia(&'a Label, &'a Formula),
    Box(&'a Label, &'a Formula),
}

pub fn plain_view(f: &Formula) -> Option<PlainView<'_>> {
    // binder freshening can rename the two copies of the operand apart, so
    // the halves are compared up to alpha equivalence
    fn same(p: &Formula, q: &Formula) -> bool {
        p == q || p.alpha_normalize() == q.alpha_normalize()
    }
    match f {
        Or(a, b) => match (a.as_ref(), b.as_ref()) {
            (DiaC(l1, p), DiaNc(l2, q)) if l1 == l2 && same(p, q) => Some(PlainView::Dia(l1, p)),
            _ => None,
        },
        And(a, b) => match (a.as_ref(), b.as_ref()) {
            (BoxC(l1, p), BoxNc(l2, q)) if l1 == l2 && same(p, q) => Some(PlainView::Box(l1, p)),
            _ => None,
        },
        _ => None,
    }
}

/// Pushes negations down to variables using the dual operators. Constants,
/// modalities and fixpoints all dualise; bound occurrences flip polarity with
/// their binder.
pub fn to_positive_normal_form(f: &Formula) -> Formula {
    fn walk(f: &Formula, neg: bool, flip: &BTreeMap<String, bool>) -> Formula {
        match f {
            Tt => {
                if neg {
                    Ff
                } else {
                    Tt
                }
            }
            Ff => {
                if neg {
                    Tt
                } else {
                    Ff
                }
            }
            Var(z) => {
                let flipped = flip.get(z).copied().unwrap_or(false);
                if neg ^ flipped {
                    Formula::neg(Var(z.clone()))
                } else {
                    Var(z.clone())
                }
            }
            Neg(a) => walk(a, !neg, flip),
            And(a, b) => {
                if neg {
                    Formula::or(walk(a, true, flip), walk(b, true, flip))
                } else {
                    Formula::and(walk(a, false, flip), walk(b, false, flip))
                }
            }
            Or(a, b) => {
                if neg {
                    Formula::and(walk(a, true, flip), walk(b, true, flip))
                } else {
                    Formula::or(walk(a, false, flip), walk(b, false, flip))
                }
            }
            DiaC(l, a) => {
                if neg {
                    BoxC(l.clone(), Box::new(walk(a, true, flip)))
                } else {
                    DiaC(l.clone(), Box::new(walk(a, false, flip)))
                }
            }
            DiaNc(l, a) => {
                if neg {
                    BoxNc(l.clone(), Box::new(walk(a, true, flip)))
                } else {
                    DiaNc(l.clone(), Box::new(walk(a, false, flip)))
                }
            }
            BoxC(l, a) => {
                if neg {
                    DiaC(l.clone(), Box::new(walk(a, true, flip)))
                } else {
                    BoxC(l.clone(), Box::new(walk(a, false, flip)))
                }
            }
            BoxNc(l, a) => {
                if neg {
                    DiaNc(l.clone(), Box::new(walk(a, true, flip)))
                } else {
                    BoxNc(l.clone(), Box::new(walk(a, false, flip)))
                }
            }
            DiaCo(a) => {
                if neg {
                    Formula::box_co(walk(a, true, flip))
                } else {
                    Formula::dia_co(walk(a, false, flip))
                }
            }
            BoxCo(a) => {
                if neg {
                    Formula::dia_co(walk(a, true, flip))
                } else {
                    Formula::box_co(walk(a, false, flip))
                }
            }
            Mu(z, a) => {
                let mut flip2 = flip.clone();
                flip2.insert(z.clone(), neg);
                if neg {
                    Nu(z.clone(), Box::new(walk(a, true, &flip2)))
                } else {
                    Mu(z.clone(), Box::new(walk(a, false, &flip2)))
                }
            }
            Nu(z, a) => {
                let mut flip2 = flip.clone();
                flip2.insert(z.clone(), neg);
                if neg {
                    Mu(z.clone(), Box::new(walk(a, true, &flip2)))
                } else {
                    Nu(z.clone(), Box::new(walk(a, false, &flip2)))
                }
            }
        }
    }
    walk(f, false, &BTreeMap::new()).distinct_binders()
}

/// The Fischer-Ladner closure: the formula, its operands, and so on down to
/// variables and constants, in first-visit order.
pub fn fl_closure(f: &Formula) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    let mut seen: BTreeSet<Formula> = BTreeSet::new();
    fn walk(f: &Formula, out: &mut Vec<Formula>, seen: &mut BTreeSet<Formula>) {
        if !seen.insert(f.clone()) {
            return;
        }
        out.push(f.clone());
        match f {
            Tt | Ff | Var(_) => {}
            Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a) | BoxCo(a)
            | Mu(_, a) | Nu(_, a) => walk(a, out, seen),
            And(a, b) | Or(a, b) => {
                walk(a, out, seen);
                walk(b, out, seen);
            }
        }
    }
    walk(f, &mut out, &mut seen);
    out
}

/// The closure actually used for game boards: plain-modality patterns are
/// kept atomic (their causal/non-causal halves never become positions), so
/// this is a subset of [`fl_closure`].
pub fn game_closure(f: &Formula) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    let mut seen: BTreeSet<Formula> = BTreeSet::new();
    fn walk(f: &Formula, out: &mut Vec<Formula>, seen: &mut BTreeSet<Formula>) {
        if !seen.insert(f.clone()) {
            return;
        }
        out.push(f.clone());
        if let Some(view) = plain_view(f) {
            match view {
                PlainView::Dia(_, body) | PlainView::Box(_, body) => walk(body, out, seen),
            }
            return;
        }
        match f {
            Tt | Ff | Var(_) => {}
            Mu(z, a) | Nu(z, a) => {
                // the unfolding rule moves through the variable position even
                // when the variable never occurs in the body
                walk(&Var(z.clone()), out, seen);
                walk(a, out, seen);
            }
            Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a) | BoxCo(a) => {
                walk(a, out, seen)
            }
            And(a, b) | Or(a, b) => {
                walk(a, out, seen);
                walk(b, out, seen);
            }
        }
    }
    walk(f, &mut out, &mut seen);
    out
}

/// Priorities for the fixpoint variables of a formula in positive normal
/// form with distinct binders: outermost binders get the most significant
/// (largest) priorities, least fixpoints odd, greatest even.
pub fn variable_priorities(f: &Formula) -> BTreeMap<String, u32> {
    fn depths(f: &Formula, d: u32, out: &mut Vec<(String, bool, u32)>) {
        match f {
            Mu(z, a) => {
                out.push((z.clone(), true, d));
                depths(a, d + 1, out);
            }
            Nu(z, a) => {
                out.push((z.clone(), false, d));
                depths(a, d + 1, out);
            }
            Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a) | BoxCo(a) => {
                depths(a, d, out)
            }
            And(a, b) | Or(a, b) => {
                depths(a, d, out);
                depths(b, d, out);
            }
            Tt | Ff | Var(_) => {}
        }
    }
    let mut binders = Vec::new();
    depths(f, 0, &mut binders);
    let maxd = binders.iter().map(|&(_, _, d)| d).max().unwrap_or(0);
    binders
        .into_iter()
        .map(|(z, is_mu, d)| {
            let base = 2 * (maxd - d);
            (z, if is_mu { base + 1 } else { base })
        })
        .collect()
}

/// Binder bodies by variable name (distinct binders assumed).
pub fn binder_map(f: &Formula) -> BTreeMap<String, Formula> {
    let mut out = BTreeMap::new();
    fn walk(f: &Formula, out: &mut BTreeMap<String, Formula>) {
        match f {
            Mu(z, a) | Nu(z, a) => {
                out.insert(z.clone(), a.as_ref().clone());
                walk(a, out);
            }
            Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a) | BoxCo(a) => {
                walk(a, out)
            }
            And(a, b) | Or(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Tt | Ff | Var(_) => {}
        }
    }
    walk(f, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FragmentId {
    Hml,
    Lmu,
    Tlmu,
    Clmu,
    Tfl,
}

impl std::fmt::Display for FragmentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FragmentId::Hml => "HML",
            FragmentId::Lmu => "LMU",
            FragmentId::Tlmu => "TLMU",
            FragmentId::Clmu => "CLMU",
            FragmentId::Tfl => "TFL",
        };
        f.write_str(s)
    }
}

fn uses_otimes(f: &Formula) -> bool {
    match f {
        DiaCo(_) | BoxCo(_) => true,
        Tt | Ff | Var(_) => false,
        Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | Mu(_, a) | Nu(_, a) => {
            uses_otimes(a)
        }
        And(a, b) | Or(a, b) => uses_otimes(a) || uses_otimes(b),
    }
}

fn uses_fixpoint(f: &Formula) -> bool {
    match f {
        Mu(..) | Nu(..) | Var(_) => true,
        Tt | Ff => false,
        Neg(a) | DiaC(_, a) | DiaNc(_, a) | BoxC(_, a) | BoxNc(_, a) | DiaCo(a) | BoxCo(a) => {
            uses_fixpoint(a)
        }
        And(a, b) | Or(a, b) => uses_fixpoint(a) || uses_fixpoint(b),
    }
}

/// True when every labelled modality occurs as a plain abbreviation pattern.
fn plain_only(f: &Formula) -> bool {
    if let Some(view) = plain_view(f) {
        return match view {
            PlainView::Dia(_, p) | PlainView::Box(_, p) => plain_only(p),
        };
    }
    match f {
        DiaC(..) | DiaNc(..) | BoxC(..) | BoxNc(..) => false,
        Tt | Ff | Var(_) => true,
        Neg(a) | DiaCo(a) | BoxCo(a) | Mu(_, a) | Nu(_, a) => plain_only(a),
        And(a, b) | Or(a, b) => plain_only(a) && plain_only(b),
    }
}

/// The smallest natural fragment containing the formula (expected in positive
/// normal form, though the classification is purely syntactic).
pub fn fragment_of(f: &Formula) -> FragmentId {
    let otimes = uses_otimes(f);
    let plain = plain_only(f);
    let fp = uses_fixpoint(f);
    if plain && !otimes && !fp {
        FragmentId::Hml
    } else if plain && !otimes {
        FragmentId::Lmu
    } else if plain {
        FragmentId::Tlmu
    } else if !otimes {
        FragmentId::Clmu
    } else {
        FragmentId::Tfl
    }
}
