//! Independent tree oracle: parses the textual scheme listing and expands
//! every node into an explicit polynomial over the four leaves.

use std::collections::BTreeMap;

use hemadisc_core::poly_tree::{COEFFICIENT_COUNT, SCHEME_COUNT};

pub const LISTING: [&str; SCHEME_COUNT] = [
    "f1(f2(RBC, Hb), f3(HCT, MCV))",
    "f1(f2(RBC, HCT), f3(Hb, MCV))",
    "f1(f2(RBC, MCV), f3(Hb, HCT))",
    "f1(f2(f3(RBC, Hb), HCT), MCV)",
    "f1(f2(f3(RBC, Hb), MCV), HCT)",
    "f1(f2(f3(RBC, HCT), Hb), MCV)",
    "f1(f2(f3(RBC, HCT), MCV), Hb)",
    "f1(f2(f3(RBC, MCV), Hb), HCT)",
    "f1(f2(f3(RBC, MCV), HCT), Hb)",
    "f1(f2(f3(Hb, HCT), RBC), MCV)",
    "f1(f2(f3(Hb, HCT), MCV), RBC)",
    "f1(f2(f3(Hb, MCV), RBC), HCT)",
    "f1(f2(f3(Hb, MCV), HCT), RBC)",
    "f1(f2(f3(HCT, MCV), RBC), Hb)",
    "f1(f2(f3(HCT, MCV), Hb), RBC)",
];

#[derive(Debug, Clone)]
pub enum Node {
    Leaf(usize),
    Call(usize, Box<Node>, Box<Node>),
}

pub fn parse(s: &str) -> Node {
    let mut p = Parser { s: s.as_bytes(), i: 0 };
    let n = p.node();
    assert_eq!(p.i, s.len(), "trailing input in {s}");
    n
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.s.get(self.i) == Some(&b' ') {
            self.i += 1;
        }
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.i;
        while self.s.get(self.i).is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap()
    }

    fn expect(&mut self, c: u8) {
        self.skip_ws();
        assert_eq!(self.s[self.i], c);
        self.i += 1;
    }

    fn node(&mut self) -> Node {
        let name = self.ident().to_string();
        match name.as_str() {
            "RBC" => Node::Leaf(0),
            "Hb" => Node::Leaf(1),
            "HCT" => Node::Leaf(2),
            "MCV" => Node::Leaf(3),
            f => {
                let k: usize = f.strip_prefix('f').unwrap().parse().unwrap();
                self.expect(b'(');
                let a = self.node();
                self.expect(b',');
                let b = self.node();
                self.expect(b')');
                Node::Call(k - 1, Box::new(a), Box::new(b))
            }
        }
    }
}

/// Polynomial over the four leaves: exponent vector to coefficient.
pub type Poly = BTreeMap<[u32; 4], f64>;

fn constant(c: f64) -> Poly {
    Poly::from([([0; 4], c)])
}

fn add(a: &Poly, b: &Poly, scale: f64) -> Poly {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(*e).or_insert(0.0) += scale * c;
    }
    out
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
            *out.entry(e).or_insert(0.0) += ca * cb;
        }
    }
    out
}

pub fn expand(node: &Node, coef: &[f64; COEFFICIENT_COUNT]) -> Poly {
    match node {
        Node::Leaf(k) => {
            let mut e = [0; 4];
            e[*k] = 1;
            Poly::from([(e, 1.0)])
        }
        Node::Call(k, a, b) => {
            let c = &coef[6 * k..6 * k + 6];
            let (u, v) = (expand(a, coef), expand(b, coef));
            let mut p = constant(c[0]);
            p = add(&p, &u, c[1]);
            p = add(&p, &v, c[2]);
            p = add(&p, &mul(&u, &v), c[3]);
            p = add(&p, &mul(&u, &u), c[4]);
            add(&p, &mul(&v, &v), c[5])
        }
    }
}

pub fn eval_expanded(p: &Poly, x: &[f64; 4]) -> f64 {
    p.iter().map(|(e, c)| c * (0..4).map(|k| x[k].powi(e[k] as i32)).product::<f64>()).sum()
}

/// Leaf reached when node `k` passes through argument `choice[k]`.
pub fn selected_leaf(node: &Node, choice: [usize; 3]) -> usize {
    match node {
        Node::Leaf(k) => *k,
        Node::Call(k, a, b) => selected_leaf(if choice[*k] == 0 { a } else { b }, choice),
    }
}
