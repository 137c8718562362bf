//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order`; multiplication, inversion and naming are
//! table lookups. Constructors cover the dihedral, cyclic and symmetric
//! families plus direct products; arbitrary tables can be loaded (and are
//! then fully verified). Coset and double-coset machinery picks canonical
//! representatives (minimal element index) so every downstream construction
//! is deterministic.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Elem = usize;

#[derive(Debug)]
pub struct FiniteGroup {
    order: usize,
    /// Row-major: `table[a * order + b] = a·b`.
    table: Vec<Elem>,
    identity: Elem,
    inverse: Vec<Elem>,
    names: Vec<String>,
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table, verifying all the
    /// axioms (identity, inverses, associativity).
    pub fn from_table(table: Vec<Vec<Elem>>, names: Option<Vec<String>>) -> Result<Arc<Self>> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &table {
            if row.len() != n {
                return Err(Error::InvalidGroup("table is not square".into()));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::InvalidGroup(format!("element index {x} out of range")));
                }
                flat.push(x);
            }
        }
        let names = match names {
            Some(v) => {
                if v.len() != n {
                    return Err(Error::InvalidGroup("name count != order".into()));
                }
                let mut seen = std::collections::HashSet::new();
                for s in &v {
                    if !seen.insert(s.clone()) {
                        return Err(Error::InvalidGroup(format!("duplicate element name {s:?}")));
                    }
                }
                v
            }
            None => (0..n).map(|i| format!("g{i}")).collect(),
        };
        let g = Self::finish(n, flat, names)?;
        g.check_associativity()?;
        Ok(Arc::new(g))
    }

    /// Internal constructor: finds the identity and inverses, checks the
    /// latin-square property, but leaves associativity to the caller (the
    /// family constructors are associative by construction).
    fn finish(n: usize, flat: Vec<Elem>, names: Vec<String>) -> Result<Self> {
        let at = |a: usize, b: usize| flat[a * n + b];
        let mut identity = None;
        for e in 0..n {
            if (0..n).all(|a| at(e, a) == a && at(a, e) == a) {
                identity = Some(e);
                break;
            }
        }
        let identity =
            identity.ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| at(a, b) == identity && at(b, a) == identity) {
                Some(b) => inverse[a] = b,
                None => {
                    return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
                }
            }
        }
        // Latin square: rows and columns are permutations.
        for a in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for b in 0..n {
                row[at(a, b)] = true;
                col[at(b, a)] = true;
            }
            if row.iter().any(|&x| !x) || col.iter().any(|&x| !x) {
                return Err(Error::InvalidGroup(format!(
                    "row/column {a} is not a permutation"
                )));
            }
        }
        Ok(FiniteGroup {
            order: n,
            table: flat,
            identity,
            inverse,
            names,
        })
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a]
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_by_name(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order
    }

    pub fn table_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// The trivial group.
    pub fn trivial() -> Arc<Self> {
        Arc::new(Self::finish(1, vec![0], vec!["e".into()]).unwrap())
    }

    /// Cyclic group of order `n`, elements `s^a` with `s = σ`.
    pub fn cyclic(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group needs n >= 1".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                flat.push((a + b) % n);
            }
        }
        let names = (0..n)
            .map(|a| match a {
                0 => "e".to_string(),
                1 => "s".to_string(),
                _ => format!("s{a}"),
            })
            .collect();
        Ok(Arc::new(Self::finish(n, flat, names)?))
    }

    /// Dihedral group of order `2n`. Element `a < n` is the rotation `σ^a`,
    /// element `n + a` the reflection `τσ^a`, with `τσ = σ⁻¹τ`.
    pub fn dihedral(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 1".into()));
        }
        let ord = 2 * n;
        let rot = |a: usize| a % n;
        let refl = |a: usize| n + a % n;
        let mut flat = vec![0usize; ord * ord];
        for a in 0..n {
            for b in 0..n {
                // σ^a σ^b = σ^{a+b}
                flat[a * ord + b] = rot(a + b);
                // σ^a τσ^b = τσ^{b-a}
                flat[a * ord + (n + b)] = refl(n + b - a);
                // τσ^a σ^b = τσ^{a+b}
                flat[(n + a) * ord + b] = refl(a + b);
                // τσ^a τσ^b = σ^{b-a}
                flat[(n + a) * ord + (n + b)] = rot(n + b - a);
            }
        }
        let mut names = Vec::with_capacity(ord);
        for a in 0..n {
            names.push(match a {
                0 => "e".to_string(),
                1 => "s".to_string(),
                _ => format!("s{a}"),
            });
        }
        for a in 0..n {
            names.push(match a {
                0 => "t".to_string(),
                1 => "ts".to_string(),
                _ => format!("ts{a}"),
            });
        }
        Ok(Arc::new(Self::finish(ord, flat, names)?))
    }

    /// Symmetric group on `n` points, elements enumerated in lexicographic
    /// one-line order and named in cycle notation. Composition applies the
    /// right factor first: `(p·q)(x) = p(q(x))`.
    ///
    /// Limited to `n <= 7` (order 5040); larger tables exceed the dense
    /// representation this crate is built on.
    pub fn symmetric(n: usize) -> Result<Arc<Self>> {
        if n == 0 || n > 7 {
            return Err(Error::InvalidGroup(format!(
                "symmetric group supported for 1 <= n <= 7 (order <= 5040), got n = {n}"
            )));
        }
        let perms = all_permutations(n);
        let index: HashMap<Vec<u8>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let ord = perms.len();
        let mut flat = vec![0usize; ord * ord];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                let prod: Vec<u8> = (0..n).map(|x| pa[pb[x] as usize]).collect();
                flat[a * ord + b] = index[&prod];
            }
        }
        let names = perms.iter().map(|p| cycle_notation(p)).collect();
        Ok(Arc::new(Self::finish(ord, flat, names)?))
    }

    /// Direct product with componentwise multiplication; the element
    /// `(a, b)` has index `a·|g2| + b` and name `"(na,nb)"`.
    pub fn product(g1: &Arc<FiniteGroup>, g2: &Arc<FiniteGroup>) -> Arc<Self> {
        let (n1, n2) = (g1.order, g2.order);
        let ord = n1 * n2;
        let mut flat = vec![0usize; ord * ord];
        for a1 in 0..n1 {
            for a2 in 0..n2 {
                let a = a1 * n2 + a2;
                for b1 in 0..n1 {
                    for b2 in 0..n2 {
                        let b = b1 * n2 + b2;
                        flat[a * ord + b] = g1.mul(a1, b1) * n2 + g2.mul(a2, b2);
                    }
                }
            }
        }
        let mut names = Vec::with_capacity(ord);
        for a1 in 0..n1 {
            for a2 in 0..n2 {
                names.push(format!("({},{})", g1.name(a1), g2.name(a2)));
            }
        }
        Arc::new(Self::finish(ord, flat, names).expect("product of groups is a group"))
    }

    /// Splits a product-group element index into its two components, given
    /// the right factor's order.
    pub fn product_split(index: Elem, order2: usize) -> (Elem, Elem) {
        (index / order2, index % order2)
    }

    /// Closes a generating set in an arbitrary associative structure and
    /// returns the abstract group plus the concrete element list (index
    /// aligned). Enumeration is breadth-first from the identity, so it is
    /// deterministic in the generator order.
    pub fn generated_from<T, M, N>(
        identity: T,
        generators: &[T],
        mul: M,
        name: N,
        max_order: usize,
    ) -> Result<(Arc<Self>, Vec<T>)>
    where
        T: Clone + Eq + Hash,
        M: Fn(&T, &T) -> T,
        N: Fn(&T) -> String,
    {
        let mut elems: Vec<T> = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::from([(identity, 0usize)]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let prod = mul(&elems[i], g);
                if !index.contains_key(&prod) {
                    if elems.len() >= max_order {
                        return Err(Error::InvalidGroup(format!(
                            "generated group exceeds the cap of {max_order} elements"
                        )));
                    }
                    index.insert(prod.clone(), elems.len());
                    elems.push(prod);
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        let n = elems.len();
        let mut flat = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                let prod = mul(&elems[a], &elems[b]);
                let idx = *index
                    .get(&prod)
                    .ok_or_else(|| Error::InvalidGroup("generated set not closed".into()))?;
                flat[a * n + b] = idx;
            }
        }
        let names = elems.iter().map(|e| name(e)).collect();
        let group = Self::finish(n, flat, names)?;
        Ok((Arc::new(group), elems))
    }

    /// Conjugacy classes as disjoint sorted element sets, ordered by their
    /// minimal element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<Elem>> {
        let n = self.order;
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for a in 0..n {
            if seen[a] {
                continue;
            }
            let mut class: Vec<Elem> = (0..n)
                .map(|g| self.mul(self.mul(g, a), self.inv(g)))
                .collect();
            class.sort_unstable();
            class.dedup();
            for &x in &class {
                seen[x] = true;
            }
            classes.push(class);
        }
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

fn all_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(current.clone());
        // Next permutation in lexicographic order.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Cycle notation on 1-based points, fixed points omitted, identity `"e"`.
fn cycle_notation(p: &[u8]) -> String {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || p[start] as usize == start {
            seen[start] = true;
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut x = p[start] as usize;
        while x != start {
            seen[x] = true;
            cyc.push(x);
            x = p[x] as usize;
        }
        out.push('(');
        out.push_str(
            &cyc.iter()
                .map(|&i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

/// A subgroup, stored both as a sorted element subset of the parent and as a
/// standalone group with its own table (names inherited).
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<Elem>,
    group: Arc<FiniteGroup>,
}

impl Subgroup {
    /// Smallest subgroup containing `gens`.
    pub fn generated(parent: &Arc<FiniteGroup>, gens: &[Elem]) -> Result<Self> {
        for &g in gens {
            if g >= parent.order() {
                return Err(Error::InvalidSubgroup(format!("generator {g} out of range")));
            }
        }
        let mut elems = vec![parent.identity()];
        let mut stack: Vec<Elem> = elems.clone();
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = parent.mul(x, g);
                if !elems.contains(&y) {
                    elems.push(y);
                    stack.push(y);
                }
            }
        }
        elems.sort_unstable();
        Self::from_sorted(parent.clone(), elems)
    }

    /// Subgroup from an explicit element set; verifies closure.
    pub fn from_elements(parent: &Arc<FiniteGroup>, elements: &[Elem]) -> Result<Self> {
        let mut elems: Vec<Elem> = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if !elems.contains(&parent.identity()) {
            return Err(Error::InvalidSubgroup("identity missing".into()));
        }
        for &a in &elems {
            if a >= parent.order() {
                return Err(Error::InvalidSubgroup(format!("element {a} out of range")));
            }
            if elems.binary_search(&parent.inv(a)).is_err() {
                return Err(Error::InvalidSubgroup(format!(
                    "not closed under inverse at {}",
                    parent.name(a)
                )));
            }
            for &b in &elems {
                if elems.binary_search(&parent.mul(a, b)).is_err() {
                    return Err(Error::InvalidSubgroup(format!(
                        "not closed under product at {}·{}",
                        parent.name(a),
                        parent.name(b)
                    )));
                }
            }
        }
        Self::from_sorted(parent.clone(), elems)
    }

    fn from_sorted(parent: Arc<FiniteGroup>, elems: Vec<Elem>) -> Result<Self> {
        let k = elems.len();
        let pos = |x: Elem| elems.binary_search(&x).expect("closure");
        let mut flat = vec![0usize; k * k];
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                flat[i * k + j] = pos(parent.mul(a, b));
            }
        }
        let names = elems.iter().map(|&a| parent.name(a).to_string()).collect();
        let group = Arc::new(FiniteGroup::finish(k, flat, names)?);
        Ok(Subgroup {
            parent,
            elements: elems,
            group,
        })
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(parent: &Arc<FiniteGroup>) -> Self {
        Self::from_sorted(parent.clone(), (0..parent.order()).collect()).unwrap()
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Self {
        Self::from_sorted(parent.clone(), vec![parent.identity()]).unwrap()
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    /// The subgroup as a standalone group; element `i` corresponds to parent
    /// element `self.embed(i)`.
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn contains(&self, parent_elem: Elem) -> bool {
        self.elements.binary_search(&parent_elem).is_ok()
    }

    /// Index of a parent element inside the subgroup, if present.
    pub fn index_of(&self, parent_elem: Elem) -> Option<usize> {
        self.elements.binary_search(&parent_elem).ok()
    }

    /// Parent element of subgroup element `i`.
    pub fn embed(&self, i: usize) -> Elem {
        self.elements[i]
    }

    pub fn is_whole(&self) -> bool {
        self.elements.len() == self.parent.order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetSide {
    Left,
    Right,
}

/// A coset decomposition with canonical representatives: each representative
/// is the minimal element of its coset; representatives are sorted ascending
/// with the identity coset first.
#[derive(Debug, Clone)]
pub struct CosetDecomposition {
    pub side: CosetSide,
    pub reps: Vec<Elem>,
    subgroup: Subgroup,
}

impl CosetDecomposition {
    pub fn left(sub: &Subgroup) -> Self {
        Self::build(sub, CosetSide::Left)
    }

    pub fn right(sub: &Subgroup) -> Self {
        Self::build(sub, CosetSide::Right)
    }

    fn build(sub: &Subgroup, side: CosetSide) -> Self {
        let g = sub.parent();
        let n = g.order();
        let mut seen = vec![false; n];
        let mut reps = Vec::new();
        for a in 0..n {
            if seen[a] {
                continue;
            }
            reps.push(a);
            for &h in sub.elements() {
                let x = match side {
                    CosetSide::Left => g.mul(a, h),
                    CosetSide::Right => g.mul(h, a),
                };
                seen[x] = true;
            }
        }
        // Ascending scan already yields minimal representatives in ascending
        // order; move the identity's coset to the front.
        if let Some(pos) = reps.iter().position(|&r| sub.contains(r)) {
            let r = reps.remove(pos);
            reps.insert(0, r);
        }
        CosetDecomposition {
            side,
            reps,
            subgroup: sub.clone(),
        }
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }

    /// Index of the coset containing `x`.
    pub fn coset_of(&self, x: Elem) -> usize {
        let g = self.subgroup.parent();
        for (i, &r) in self.reps.iter().enumerate() {
            let inside = match self.side {
                CosetSide::Left => self.subgroup.contains(g.mul(g.inv(r), x)),
                CosetSide::Right => self.subgroup.contains(g.mul(x, g.inv(r))),
            };
            if inside {
                return i;
            }
        }
        unreachable!("cosets cover the group");
    }
}

/// Double cosets `K t H` with refined left-coset representatives.
///
/// For each double-coset representative `t_k`, `refined[k]` is a list of
/// left-coset representatives of `H` that covers `K t_k H`; its first entry
/// is `t_k` itself and any two entries differ by left multiplication with an
/// element of `K`. The union of all `refined[k]` is a complete left-coset
/// decomposition of `H` in the parent.
#[derive(Debug, Clone)]
pub struct DoubleCosetDecomposition {
    pub reps: Vec<Elem>,
    pub refined: Vec<Vec<Elem>>,
    pub left: Subgroup,
    pub right: Subgroup,
}

impl DoubleCosetDecomposition {
    pub fn new(k: &Subgroup, h: &Subgroup) -> Result<Self> {
        if !Arc::ptr_eq(k.parent(), h.parent()) {
            return Err(Error::GroupMismatch(
                "double cosets need subgroups of the same group".into(),
            ));
        }
        let g = k.parent();
        let n = g.order();
        let mut seen = vec![false; n];
        let mut reps = Vec::new();
        let mut refined = Vec::new();
        for t in 0..n {
            if seen[t] {
                continue;
            }
            reps.push(t);
            // Left cosets inside K t H, represented by κ·t for the minimal κ
            // reaching each coset; t itself comes first.
            let mut coset_reps: Vec<Elem> = Vec::new();
            let mut coset_seen: Vec<Elem> = Vec::new();
            for &kappa in k.elements() {
                let kt = g.mul(kappa, t);
                if coset_seen.contains(&kt) {
                    continue;
                }
                coset_reps.push(kt);
                for &eta in h.elements() {
                    let x = g.mul(kt, eta);
                    seen[x] = true;
                    coset_seen.push(x);
                }
            }
            refined.push(coset_reps);
        }
        let total: usize = refined.iter().map(|r| r.len()).sum();
        if total * h.len() != n {
            return Err(Error::InvalidSubgroup(
                "refined double-coset representatives do not tile the group".into(),
            ));
        }
        Ok(DoubleCosetDecomposition {
            reps,
            refined,
            left: k.clone(),
            right: h.clone(),
        })
    }
}

/// Returns true when the two handles denote the same group (same allocation
/// or identical tables).
pub fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || (a.order == b.order && a.table == b.table)
}

/// Built-in groups addressable by string id: `D4`, `S3`, `S4`, `D4xD4`,
/// `Dn:<n>`, `Zn:<n>`, `D3`.
pub fn builtin(id: &str) -> Result<Arc<FiniteGroup>> {
    match id {
        "D3" => FiniteGroup::dihedral(3),
        "D4" => FiniteGroup::dihedral(4),
        "S3" => FiniteGroup::symmetric(3),
        "S4" => FiniteGroup::symmetric(4),
        "D4xD4" => {
            let d4 = FiniteGroup::dihedral(4)?;
            Ok(FiniteGroup::product(&d4, &d4))
        }
        _ => {
            if let Some(n) = id.strip_prefix("Dn:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::parse(format!("bad dihedral id {id:?}")))?;
                FiniteGroup::dihedral(n)
            } else if let Some(n) = id.strip_prefix("Zn:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::parse(format!("bad cyclic id {id:?}")))?;
                FiniteGroup::cyclic(n)
            } else {
                Err(Error::parse(format!("unknown builtin group {id:?}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_relations() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        let s = d4.element_by_name("s").unwrap();
        let t = d4.element_by_name("t").unwrap();
        // σ⁴ = e, τ² = e
        assert_eq!(d4.element_order(s), 4);
        assert_eq!(d4.element_order(t), 2);
        // τσ = σ⁻¹τ
        assert_eq!(d4.mul(t, s), d4.mul(d4.inv(s), t));
        // degenerate case: D1 ≅ Z2
        let d1 = FiniteGroup::dihedral(1).unwrap();
        assert_eq!(d1.order(), 2);
        assert!(d1.is_abelian());
    }

    #[test]
    fn dihedral_named_subgroups() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        let by = |n: &str| d4.element_by_name(n).unwrap();
        let h1 = Subgroup::generated(&d4, &[by("t"), by("ts2")]).unwrap();
        let names: Vec<&str> = h1.elements().iter().map(|&e| d4.name(e)).collect();
        assert_eq!(names, vec!["e", "s2", "t", "ts2"]);
        let h2 = Subgroup::generated(&d4, &[by("ts"), by("ts3")]).unwrap();
        let names: Vec<&str> = h2.elements().iter().map(|&e| d4.name(e)).collect();
        assert_eq!(names, vec!["e", "s2", "ts", "ts3"]);
        let h3 = Subgroup::generated(&d4, &[by("s")]).unwrap();
        let names: Vec<&str> = h3.elements().iter().map(|&e| d4.name(e)).collect();
        assert_eq!(names, vec!["e", "s", "s2", "s3"]);
        let triv = Subgroup::generated(&d4, &[]).unwrap();
        assert_eq!(triv.len(), 1);
    }

    #[test]
    fn symmetric_group_basics() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        let s4 = FiniteGroup::symmetric(4).unwrap();
        assert_eq!(s4.order(), 24);
        let t34 = s4.element_by_name("(3 4)").unwrap();
        assert_eq!(s4.element_order(t34), 2);
        assert!(FiniteGroup::symmetric(8).is_err());
    }

    /// Independent brute-force conjugacy partition used as the oracle for the
    /// class enumeration tests.
    fn brute_force_classes(g: &FiniteGroup) -> Vec<Vec<Elem>> {
        let n = g.order();
        let mut classes: Vec<Vec<Elem>> = Vec::new();
        'outer: for a in 0..n {
            for cl in &classes {
                if cl.contains(&a) {
                    continue 'outer;
                }
            }
            let mut cl = Vec::new();
            for x in 0..n {
                let conj = g.mul(g.mul(x, a), g.inv(x));
                if !cl.contains(&conj) {
                    cl.push(conj);
                }
            }
            cl.sort_unstable();
            classes.push(cl);
        }
        classes.sort_by_key(|c| c[0]);
        classes
    }

    #[test]
    fn conjugacy_classes_match_brute_force() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        let classes = d4.conjugacy_classes();
        assert_eq!(classes.len(), 5);
        assert_eq!(classes, brute_force_classes(&d4));

        let s4 = FiniteGroup::symmetric(4).unwrap();
        let classes = s4.conjugacy_classes();
        assert_eq!(classes.len(), 5);
        let mut sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
        assert_eq!(classes, brute_force_classes(&s4));

        // Abelian: all singletons.
        let z6 = FiniteGroup::cyclic(6).unwrap();
        assert!(z6.conjugacy_classes().iter().all(|c| c.len() == 1));

        // Class sizes divide the group order.
        for cl in FiniteGroup::symmetric(4).unwrap().conjugacy_classes() {
            assert_eq!(24 % cl.len(), 0);
        }
    }

    #[test]
    fn product_group() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        let g = FiniteGroup::product(&d4, &d4);
        assert_eq!(g.order(), 64);
        let triv = FiniteGroup::trivial();
        let gt = FiniteGroup::product(&d4, &triv);
        assert_eq!(gt.table_rows(), d4.table_rows());
        // (Z2 × Z2) has 4 conjugacy classes.
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let v4 = FiniteGroup::product(&z2, &z2);
        assert_eq!(v4.conjugacy_classes().len(), 4);
    }

    #[test]
    fn left_cosets_partition() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        let h1 = Subgroup::generated(&d4, &[4, 6]).unwrap();
        let cosets = CosetDecomposition::left(&h1);
        assert_eq!(cosets.count(), 2);
        assert_eq!(cosets.reps[0], 0);

        let whole = Subgroup::whole(&d4);
        assert_eq!(CosetDecomposition::left(&whole).count(), 1);

        // S4 / <(3 4)>: 12 cosets; brute-force partition check.
        let s4 = FiniteGroup::symmetric(4).unwrap();
        let t34 = s4.element_by_name("(3 4)").unwrap();
        let h = Subgroup::generated(&s4, &[t34]).unwrap();
        let cosets = CosetDecomposition::left(&h);
        assert_eq!(cosets.count(), 12);
        let mut covered = vec![false; 24];
        for &r in &cosets.reps {
            for &x in h.elements() {
                let y = s4.mul(r, x);
                assert!(!covered[y], "cosets overlap");
                covered[y] = true;
            }
        }
        assert!(covered.iter().all(|&c| c));
        // Canonical choice: each representative is minimal in its coset.
        for &r in &cosets.reps {
            for &x in h.elements() {
                assert!(s4.mul(r, x) >= r);
            }
        }
    }

    #[test]
    fn double_cosets() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        let h1 = Subgroup::generated(&d4, &[4, 6]).unwrap();
        let h2 = Subgroup::generated(&d4, &[5, 7]).unwrap();

        // K = {e}: double cosets coincide with left cosets of H.
        let triv = Subgroup::trivial(&d4);
        let dc = DoubleCosetDecomposition::new(&triv, &h2).unwrap();
        let lc = CosetDecomposition::left(&h2);
        assert_eq!(dc.reps.len(), lc.count());

        // K = G: a single double coset.
        let whole = Subgroup::whole(&d4);
        let dc = DoubleCosetDecomposition::new(&whole, &h2).unwrap();
        assert_eq!(dc.reps.len(), 1);

        // Generic case: brute-force union check of K·t·H over all t.
        let dc = DoubleCosetDecomposition::new(&h1, &h2).unwrap();
        let mut covered = vec![false; 8];
        for &t in &dc.reps {
            for &ka in h1.elements() {
                for &hb in h2.elements() {
                    covered[d4.mul(d4.mul(ka, t), hb)] = true;
                }
            }
        }
        assert!(covered.iter().all(|&c| c));
        // Refined representatives tile G by left H-cosets and stay inside one
        // K-orbit per double coset.
        let mut seen = vec![false; 8];
        for (k_idx, reps) in dc.refined.iter().enumerate() {
            assert_eq!(reps[0], dc.reps[k_idx]);
            for &t in reps {
                for &hb in h2.elements() {
                    let x = d4.mul(t, hb);
                    assert!(!seen[x]);
                    seen[x] = true;
                }
                let linked = h1
                    .elements()
                    .iter()
                    .any(|&ka| d4.mul(ka, dc.reps[k_idx]) == t);
                assert!(linked, "refined rep not in the K-orbit of t_k");
            }
        }
        assert!(seen.iter().all(|&c| c));
    }

    #[test]
    fn group_axiom_spot_checks() {
        for g in [
            FiniteGroup::dihedral(4).unwrap(),
            FiniteGroup::symmetric(4).unwrap(),
            FiniteGroup::cyclic(5).unwrap(),
        ] {
            for a in g.elements() {
                assert_eq!(g.mul(a, g.inv(a)), g.identity());
                for b in g.elements() {
                    for c in g.elements() {
                        assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn from_table_rejects_broken_tables() {
        // Non-associative latin square (order 5 loop).
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table(table, None).is_err());
    }

    #[test]
    fn builtin_registry() {
        assert_eq!(builtin("D4").unwrap().order(), 8);
        assert_eq!(builtin("S4").unwrap().order(), 24);
        assert_eq!(builtin("D4xD4").unwrap().order(), 64);
        assert_eq!(builtin("Dn:6").unwrap().order(), 12);
        assert_eq!(builtin("Zn:5").unwrap().order(), 5);
        assert!(builtin("E8").is_err());
    }
}
