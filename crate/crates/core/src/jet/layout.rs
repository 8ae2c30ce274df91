//! Dense graded-lexicographic coefficient layouts, built once per shape.

use std::sync::OnceLock;

use super::{MAX_ORDER, MAX_VARS};

pub(crate) struct Layout {
    nvars: usize,
    monomials: Vec<[u8; MAX_VARS]>,
    /// (i, j, k): monomial i times monomial j is monomial k.
    products: Vec<(u8, u8, u8)>,
    /// Per variable: for each monomial of the next-lower layout, the source
    /// index in this layout and the factor picked up by differentiation.
    lift: Vec<Vec<(usize, f64)>>,
}

impl Layout {
    pub(crate) fn get(nvars: usize, order: usize) -> &'static Layout {
        static TABLES: OnceLock<Vec<Layout>> = OnceLock::new();
        let tables = TABLES.get_or_init(|| {
            let mut v = Vec::new();
            for n in 1..=MAX_VARS {
                for o in 0..=MAX_ORDER {
                    v.push(Layout::build(n, o));
                }
            }
            v
        });
        &tables[(nvars - 1) * (MAX_ORDER + 1) + order]
    }

    fn build(nvars: usize, order: usize) -> Layout {
        let mut monomials = Vec::new();
        for degree in 0..=order {
            let mut block = Vec::new();
            enumerate(nvars, degree, 0, [0; MAX_VARS], &mut block);
            // descending lexicographic within a degree: x0 before x1, x0^2 before x0 x1
            block.sort_by(|a, b| b.cmp(a));
            monomials.extend(block);
        }
        let index = |m: &[u8; MAX_VARS]| monomials.iter().position(|x| x == m);
        let mut products = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                let mut s = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    s[v] = a[v] + b[v];
                }
                if let Some(k) = index(&s) {
                    products.push((i as u8, j as u8, k as u8));
                }
            }
        }
        let mut lift = Vec::new();
        if order > 0 {
            for var in 0..nvars {
                let mut map = Vec::new();
                for m in monomials.iter().filter(|m| degree(m) < order) {
                    let mut up = *m;
                    up[var] += 1;
                    map.push((index(&up).expect("raised monomial in layout"), up[var] as f64));
                }
                lift.push(map);
            }
        }
        Layout { nvars, monomials, products, lift }
    }

    pub(crate) fn len(&self) -> usize {
        self.monomials.len()
    }

    pub(crate) fn products(&self) -> &[(u8, u8, u8)] {
        &self.products
    }

    pub(crate) fn lift_map(&self, var: usize) -> &[(usize, f64)] {
        &self.lift[var]
    }

    pub(crate) fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        if alpha.len() > self.nvars {
            return None;
        }
        let mut key = [0u8; MAX_VARS];
        key[..alpha.len()].copy_from_slice(alpha);
        self.monomials.iter().position(|m| *m == key)
    }
}

fn degree(m: &[u8; MAX_VARS]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

fn enumerate(nvars: usize, remaining: usize, var: usize, cur: [u8; MAX_VARS], out: &mut Vec<[u8; MAX_VARS]>) {
    if var == nvars - 1 {
        let mut m = cur;
        m[var] = remaining as u8;
        out.push(m);
        return;
    }
    for e in 0..=remaining {
        let mut m = cur;
        m[var] = e as u8;
        enumerate(nvars, remaining - e, var + 1, m, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_prefix_property() {
        for n in 1..=MAX_VARS {
            for o in 1..=MAX_ORDER {
                let lo = Layout::get(n, o - 1);
                let hi = Layout::get(n, o);
                assert_eq!(&hi.monomials[..lo.len()], &lo.monomials[..]);
            }
        }
        let l = Layout::get(2, 2);
        assert_eq!(
            l.monomials.iter().map(|m| (m[0], m[1])).collect::<Vec<_>>(),
            vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        );
    }
}
