use super::{AffineMap, RMPolynomial};

/// Outcome of a bounded equivalence search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// `g = f∘a`.
    Found(AffineMap),
    NotEquivalent,
    /// Node budget ran out before the search finished.
    Unknown,
}

/// Backtracking search for an affine map carrying one support onto another.
#[derive(Clone, Copy, Debug)]
pub struct EquivalenceSearch {
    pub node_budget: usize,
}

impl Default for EquivalenceSearch {
    fn default() -> Self {
        Self { node_budget: 2_000_000 }
    }
}

/// Number of pairs `{y, z}` in `s` with `x + y + z` also in `s`.
fn signatures(points: &[usize], member: &[bool]) -> Vec<u32> {
    points
        .iter()
        .map(|&x| {
            let mut count = 0;
            for (i, &y) in points.iter().enumerate() {
                if y == x {
                    continue;
                }
                for &z in &points[i + 1..] {
                    if z != x && member[x ^ y ^ z] {
                        count += 1;
                    }
                }
            }
            count
        })
        .collect()
}

struct Side {
    points: Vec<usize>,
    member: Vec<bool>,
    sig: Vec<u32>,
}

impl Side {
    fn new(p: &RMPolynomial, complement: bool) -> Side {
        let n = 1usize << p.m();
        let member: Vec<bool> = (0..n).map(|x| p.eval(x) != complement).collect();
        let points: Vec<usize> = (0..n).filter(|&x| member[x]).collect();
        let sig = signatures(&points, &member);
        Side { points, member, sig }
    }

    fn sig_of(&self, x: usize) -> u32 {
        let i = self.points.binary_search(&x).expect("support point");
        self.sig[i]
    }
}

fn reduce(v: usize, basis: &[usize]) -> usize {
    basis.iter().fold(v, |r, &b| r.min(r ^ b))
}

fn insert_reduced(basis: &mut Vec<usize>, v: usize) -> bool {
    let r = reduce(v, basis);
    if r == 0 {
        return false;
    }
    basis.push(r);
    basis.sort_unstable_by(|a, b| b.cmp(a));
    true
}

struct Search<'a> {
    src: &'a Side,
    dst: &'a Side,
    order: Vec<usize>,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    fn run(&mut self, images: &mut Vec<usize>, span_src: &mut Vec<usize>, span_dst: &mut Vec<usize>, red: &mut Vec<usize>) -> Option<bool> {
        let i = images.len();
        if i == self.order.len() {
            return Some(true);
        }
        let x = self.order[i];
        let want = self.src.sig_of(x);
        for (ci, &y) in self.dst.points.iter().enumerate() {
            if self.dst.sig[ci] != want {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let mut new_red = red.clone();
            if i > 0 && !insert_reduced(&mut new_red, y ^ images[0]) {
                continue;
            }
            if i == 0 {
                images.push(y);
                span_src.push(x);
                span_dst.push(y);
                match self.run(images, span_src, span_dst, red) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                images.pop();
                span_src.pop();
                span_dst.pop();
                continue;
            }
            let ds = x ^ self.order[0];
            let dd = y ^ images[0];
            let len = span_src.len();
            let consistent = (0..len).all(|k| {
                self.src.member[span_src[k] ^ ds] == self.dst.member[span_dst[k] ^ dd]
            });
            if !consistent {
                continue;
            }
            for k in 0..len {
                span_src.push(span_src[k] ^ ds);
                span_dst.push(span_dst[k] ^ dd);
            }
            images.push(y);
            match self.run(images, span_src, span_dst, &mut new_red) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            images.pop();
            span_src.truncate(len);
            span_dst.truncate(len);
        }
        Some(false)
    }
}

/// Greedy affine basis of the support, each step adding the point whose
/// inclusion covers the most support points.
fn basis_order(side: &Side) -> Vec<usize> {
    let Some(&x0) = side.points.first() else { return Vec::new() };
    let mut order = vec![x0];
    let mut span = vec![x0];
    let mut red: Vec<usize> = Vec::new();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for &y in &side.points {
            if reduce(y ^ x0, &red) == 0 {
                continue;
            }
            let d = y ^ x0;
            let covered = span.iter().filter(|&&s| side.member[s ^ d]).count();
            if best.is_none_or(|(c, _)| covered > c) {
                best = Some((covered, y));
            }
        }
        let Some((_, y)) = best else { break };
        insert_reduced(&mut red, y ^ x0);
        let d = y ^ x0;
        let extra: Vec<usize> = span.iter().map(|&s| s ^ d).collect();
        span.extend(extra);
        order.push(y);
    }
    order
}

/// Linear map sending `src[i] -> dst[i]`, completed on a complement.
fn complete_linear(m: usize, src: &[usize], dst: &[usize]) -> Vec<usize> {
    let mut s = src.to_vec();
    let mut d = dst.to_vec();
    let mut red_s: Vec<usize> = Vec::new();
    let mut red_d: Vec<usize> = Vec::new();
    for &v in src {
        insert_reduced(&mut red_s, v);
    }
    for &v in dst {
        insert_reduced(&mut red_d, v);
    }
    let mut fill_d = (0..m).map(|j| 1usize << j).filter(|&e| reduce(e, &red_d) != 0).collect::<Vec<_>>().into_iter();
    for j in 0..m {
        let e = 1usize << j;
        if insert_reduced(&mut red_s, e) {
            s.push(e);
            loop {
                let cand = fill_d.next().expect("complement exists");
                if insert_reduced(&mut red_d, cand) {
                    d.push(cand);
                    break;
                }
            }
        }
    }
    // Solve for images of unit vectors: track combinations over s.
    let mut rows: Vec<(usize, usize)> = s.iter().zip(&d).map(|(&a, &b)| (a, b)).collect();
    for bit in 0..m {
        let p = (bit..m).find(|&r| rows[r].0 >> bit & 1 == 1).expect("full rank");
        rows.swap(bit, p);
        let piv = rows[bit];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != bit && row.0 >> bit & 1 == 1 {
                row.0 ^= piv.0;
                row.1 ^= piv.1;
            }
        }
    }
    rows.iter().map(|&(_, img)| img).collect()
}

impl EquivalenceSearch {
    /// Looks for `a` with `g = f∘a`.
    pub fn find(&self, f: &RMPolynomial, g: &RMPolynomial) -> Equivalence {
        let m = f.m();
        if g.m() != m || f.weight() != g.weight() || f.degree() != g.degree() {
            return Equivalence::NotEquivalent;
        }
        let n = 1usize << m;
        let w = f.weight();
        if w == 0 || w == n {
            return Equivalence::Found(AffineMap::identity(m));
        }
        let complement = 2 * w > n;
        let sf = Side::new(f, complement);
        let sg = Side::new(g, complement);
        let mut a = sf.sig.clone();
        let mut b = sg.sig.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Equivalence::NotEquivalent;
        }
        let order = basis_order(&sg);
        if order.len() != basis_order(&sf).len() {
            return Equivalence::NotEquivalent;
        }
        let mut search = Search { src: &sg, dst: &sf, order, nodes: 0, budget: self.node_budget };
        let mut images = Vec::new();
        match search.run(&mut images, &mut Vec::new(), &mut Vec::new(), &mut Vec::new()) {
            None => Equivalence::Unknown,
            Some(false) => Equivalence::NotEquivalent,
            Some(true) => {
                let x0 = search.order[0];
                let src: Vec<usize> = search.order[1..].iter().map(|&x| x ^ x0).collect();
                let dst: Vec<usize> = images[1..].iter().map(|&y| y ^ images[0]).collect();
                let cols = complete_linear(m, &src, &dst);
                let lin = AffineMap::from_columns(m, cols, 0).expect("invertible by construction");
                let shift = lin.apply_linear(x0) ^ images[0];
                let map = AffineMap::from_columns(m, lin.columns().to_vec(), shift).expect("invertible");
                debug_assert_eq!(f.apply_affine(&map).as_ref(), Ok(g));
                if f.apply_affine(&map).as_ref() == Ok(g) {
                    Equivalence::Found(map)
                } else {
                    Equivalence::NotEquivalent
                }
            }
        }
    }
}

/// Some `a` with `g = f∘a`, if one exists (default node budget).
pub fn affine_equivalence(f: &RMPolynomial, g: &RMPolynomial) -> Option<AffineMap> {
    match EquivalenceSearch::default().find(f, g) {
        Equivalence::Found(a) => Some(a),
        _ => None,
    }
}

/// Three-valued equivalence test: `None` when undecided within budget.
pub fn are_affine_equivalent(f: &RMPolynomial, g: &RMPolynomial, node_budget: usize) -> Option<bool> {
    match (EquivalenceSearch { node_budget }).find(f, g) {
        Equivalence::Found(_) => Some(true),
        Equivalence::NotEquivalent => Some(false),
        Equivalence::Unknown => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str, m: usize) -> RMPolynomial {
        RMPolynomial::parse(s, Some(m)).unwrap()
    }

    #[test]
    fn finds_scrambling_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in ["x1*x2*x3", "x1*x2 + x3*x4", "x1*x2*x3 + x4*x5*x6", "x1*x2 + x2*x3*x5 + x1*x4*x6", "x1*x4 + x2*x5*x6 + x3"] {
            for _ in 0..5 {
                let f = p(s, 6);
                let a = AffineMap::random(6, &mut rng);
                let g = f.apply_affine(&a).unwrap();
                let found = affine_equivalence(&f, &g).expect("equivalent");
                assert_eq!(f.apply_affine(&found).unwrap(), g);
            }
        }
    }

    #[test]
    fn separates_distinct_classes() {
        let a = p("x1*x2 + x2*x3*x5 + x1*x4*x6", 6);
        let b = p("x1*x2*x3 + x2*x3*x4 + x1*x2*x5 + x1*x3*x6 + x4*x5*x6", 6);
        assert_eq!(are_affine_equivalent(&a, &b, 1_000_000), Some(false));
        let c = p("x1*x2 + x3*x4", 6);
        let d = p("x1*x2 + x3*x4 + x5*x6", 6);
        assert_eq!(are_affine_equivalent(&c, &d, 1_000_000), Some(false));
    }

    #[test]
    fn non_spanning_supports() {
        let f = p("x1*x2*x3*x7*x8", 8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = AffineMap::random(8, &mut rng);
        let g = f.apply_affine(&a).unwrap();
        let found = affine_equivalence(&f, &g).unwrap();
        assert_eq!(f.apply_affine(&found).unwrap(), g);
    }
}
