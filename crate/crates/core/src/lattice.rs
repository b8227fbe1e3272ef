//! Geometry of `Z^d` and of finite tori: dilations by a neighbourhood,
//! inner boundaries, box packings and influence windows.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{invalid, Error, Result};

/// A point (or offset) of `Z^d`. Ordering is lexicographic on coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(pub Vec<i64>);

impl Site {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Site(coords.into())
    }

    pub fn origin(dim: usize) -> Self {
        Site(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn translate(&self, by: &Site) -> Site {
        Site(self.0.iter().zip(&by.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<i64> for Site {
    fn from(x: i64) -> Self {
        Site(vec![x])
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A finite set of sites in canonical (lexicographic) order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SiteSet {
    dim: usize,
    sites: BTreeSet<Site>,
}

impl SiteSet {
    pub fn empty(dim: usize) -> Self {
        SiteSet { dim, sites: BTreeSet::new() }
    }

    pub fn from_sites(dim: usize, sites: impl IntoIterator<Item = Site>) -> Result<Self> {
        let mut set = SiteSet::empty(dim);
        for s in sites {
            check_dim(dim, s.dim())?;
            set.sites.insert(s);
        }
        Ok(set)
    }

    /// The 1D interval `{lo, ..., hi}`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        SiteSet { dim: 1, sites: (lo..=hi).map(Site::from).collect() }
    }

    /// The box `lo + [0, sides-1]` with sides given per axis.
    pub fn boxed(lo: &[i64], sides: &[usize]) -> Self {
        let dim = lo.len();
        assert_eq!(dim, sides.len());
        let mut sites = BTreeSet::new();
        let total: usize = sides.iter().product();
        for mut idx in 0..total {
            let mut coords = vec![0i64; dim];
            for axis in (0..dim).rev() {
                coords[axis] = lo[axis] + (idx % sides[axis]) as i64;
                idx /= sides[axis];
            }
            sites.insert(Site(coords));
        }
        SiteSet { dim, sites }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, s: &Site) -> bool {
        self.sites.contains(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter()
    }

    pub fn insert(&mut self, s: Site) -> Result<bool> {
        check_dim(self.dim, s.dim())?;
        Ok(self.sites.insert(s))
    }

    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.sites.is_subset(&other.sites)
    }

    pub fn union(&self, other: &SiteSet) -> Result<SiteSet> {
        check_dim(self.dim, other.dim)?;
        Ok(SiteSet { dim: self.dim, sites: self.sites.union(&other.sites).cloned().collect() })
    }

    pub fn difference(&self, other: &SiteSet) -> SiteSet {
        SiteSet { dim: self.dim, sites: self.sites.difference(&other.sites).cloned().collect() }
    }

    /// Per-axis `(min, max)` of the bounding box, or `None` when empty.
    pub fn bounding_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.sites.iter();
        let first = it.next()?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for s in it {
            for axis in 0..self.dim {
                lo[axis] = lo[axis].min(s.0[axis]);
                hi[axis] = hi[axis].max(s.0[axis]);
            }
        }
        Some((lo, hi))
    }

    /// Largest bounding-box side; the set fits in a cube of this side.
    pub fn diameter(&self) -> usize {
        match self.bounding_box() {
            None => 0,
            Some((lo, hi)) => lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as usize).max().unwrap_or(0),
        }
    }

    /// Side lengths if the set is exactly an axis-aligned box.
    pub fn box_sides(&self) -> Option<Vec<usize>> {
        let (lo, hi) = self.bounding_box()?;
        let sides: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as usize).collect();
        let volume: usize = sides.iter().product();
        (volume == self.len()).then_some(sides)
    }
}

/// An ordered dependence neighbourhood `N`. The order fixes rule row indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Neighbourhood {
    dim: usize,
    offsets: Vec<Site>,
    radius: u64,
}

impl Neighbourhood {
    pub fn new(dim: usize, offsets: Vec<Site>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if offsets.is_empty() {
            return Err(invalid("neighbourhood must be non-empty"));
        }
        let mut seen = BTreeSet::new();
        for o in &offsets {
            check_dim(dim, o.dim())?;
            if !seen.insert(o.clone()) {
                return Err(invalid(format!("duplicate offset {o:?}")));
            }
        }
        let radius = offsets.iter().flat_map(|o| o.0.iter()).map(|c| c.unsigned_abs()).max().unwrap_or(0);
        Ok(Neighbourhood { dim, offsets, radius })
    }

    /// 1D neighbourhood from a list of integer offsets.
    pub fn line(offsets: &[i64]) -> Result<Self> {
        Neighbourhood::new(1, offsets.iter().map(|&o| Site::from(o)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offsets(&self) -> &[Site] {
        &self.offsets
    }

    /// `rho = |N|`.
    pub fn size(&self) -> usize {
        self.offsets.len()
    }

    /// Smallest `r` with `N` inside `[-r, r]^d`.
    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn contains_origin(&self) -> bool {
        self.offsets.iter().any(|o| o.0.iter().all(|&c| c == 0))
    }

    /// `N(k) = k + N` in neighbourhood order.
    pub fn around(&self, k: &Site) -> Vec<Site> {
        self.offsets.iter().map(|o| k.translate(o)).collect()
    }
}

/// `N(A) = {a + i : a in A, i in N}`.
pub fn neighbourhood_of(a: &SiteSet, n: &Neighbourhood) -> Result<SiteSet> {
    check_dim(n.dim, a.dim)?;
    let mut out = SiteSet::empty(a.dim);
    for s in a.iter() {
        for o in n.offsets() {
            out.sites.insert(s.translate(o));
        }
    }
    Ok(out)
}

/// `N^t(A)`, with `N^0(A) = A`.
pub fn iterated_neighbourhood(a: &SiteSet, n: &Neighbourhood, t: usize) -> Result<SiteSet> {
    check_dim(n.dim, a.dim)?;
    let mut cur = a.clone();
    for _ in 0..t {
        cur = neighbourhood_of(&cur, n)?;
    }
    Ok(cur)
}

/// `{k in J : N(k) not inside J}`.
pub fn inner_boundary(j: &SiteSet, n: &Neighbourhood) -> Result<SiteSet> {
    check_dim(n.dim, j.dim)?;
    let mut out = SiteSet::empty(j.dim);
    for k in j.iter() {
        if n.around(k).iter().any(|s| !j.contains(s)) {
            out.sites.insert(k.clone());
        }
    }
    Ok(out)
}

/// Inner boundary of a set of torus sites, with neighbourhoods wrapped.
pub fn inner_boundary_on_torus(j: &SiteSet, n: &Neighbourhood, torus: &TorusSpec) -> Result<SiteSet> {
    check_dim(n.dim, j.dim)?;
    check_dim(torus.dim(), j.dim)?;
    let wrapped = SiteSet::from_sites(j.dim, j.iter().map(|s| torus.wrap(s)))?;
    let mut out = SiteSet::empty(j.dim);
    for k in wrapped.iter() {
        if n.around(k).iter().any(|s| !wrapped.contains(&torus.wrap(s))) {
            out.sites.insert(k.clone());
        }
    }
    Ok(out)
}

/// Maximum number of disjoint translates of box `a` inside box `b`.
pub fn packing_number(b: &SiteSet, a: &SiteSet) -> Result<u64> {
    check_dim(b.dim, a.dim)?;
    let sb = b.box_sides().ok_or_else(|| Error::UnsupportedShape("outer set is not a box".into()))?;
    let sa = a.box_sides().ok_or_else(|| Error::UnsupportedShape("inner set is not a box".into()))?;
    Ok(sb.iter().zip(&sa).map(|(x, y)| (x / y) as u64).product())
}

/// Number of dilations `floor(max{8 rho t, ln(a/eps)})`, clamped at zero.
pub fn influence_iterations(a: usize, rho: usize, eps: f64, t: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0,1), got {eps}")));
    }
    if t < 0.0 {
        return Err(invalid("t must be non-negative"));
    }
    let s = (8.0 * rho as f64 * t).max((a as f64 / eps).ln());
    Ok(if s > 0.0 { s.floor() as usize } else { 0 })
}

/// `N_{eps,t}(A)`: the dilation of `A` that contains the infected region
/// at time `t` with probability at least `1 - eps`.
pub fn influence_window(a: &SiteSet, n: &Neighbourhood, eps: f64, t: f64) -> Result<SiteSet> {
    let s = influence_iterations(a.len(), n.size(), eps, t)?;
    iterated_neighbourhood(a, n, s)
}

/// A finite periodic lattice with the given side length per axis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorusSpec {
    sides: Vec<usize>,
}

impl TorusSpec {
    pub fn new(sides: Vec<usize>) -> Result<Self> {
        if sides.is_empty() || sides.contains(&0) {
            return Err(invalid("torus sides must be positive"));
        }
        Ok(TorusSpec { sides })
    }

    pub fn ring(n: usize) -> Result<Self> {
        TorusSpec::new(vec![n])
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn site_count(&self) -> usize {
        self.sides.iter().product()
    }

    pub fn wrap(&self, s: &Site) -> Site {
        Site(s.0.iter().zip(&self.sides).map(|(&c, &l)| c.rem_euclid(l as i64)).collect())
    }

    /// Lexicographic index of the wrapped site.
    pub fn index_of(&self, s: &Site) -> usize {
        let w = self.wrap(s);
        w.0.iter().zip(&self.sides).fold(0usize, |acc, (&c, &l)| acc * l + c as usize)
    }

    pub fn site_at(&self, mut idx: usize) -> Site {
        let mut coords = vec![0i64; self.dim()];
        for axis in (0..self.dim()).rev() {
            coords[axis] = (idx % self.sides[axis]) as i64;
            idx /= self.sides[axis];
        }
        Site(coords)
    }

    /// All sites, in index order (which is also canonical order).
    pub fn sites(&self) -> SiteSet {
        SiteSet::boxed(&vec![0; self.dim()], &self.sides)
    }
}
