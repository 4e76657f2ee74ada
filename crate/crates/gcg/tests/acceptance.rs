//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Expected values are recomputed here from first principles (breadth-first
//! girth, a set-product triple search, coset-graph sizes, grid counts) rather
//! than read back from the library.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gcg::develop::{self, LinkCentre, VertexType};
use gcg::examples::{self, TorusCurve};
use gcg::flats::{self, Consistency, Hex, HexTorus};
use gcg::gcog::{self, ComplexFailure, Verdict};
use gcg::groups::{self, AxiomViolation, FiniteGroup, GroupTable, MonoViolation};
use gcg::poset::{self, ConventionFailure, Girth, OneDimPoset, PosetError};
use gcg::smallcancel::{self, AngleAssignment, LinkSite};
use gcg::wise;
use gcg::{develop_ball, develop_focused, GraphicalComplexOfGroups, VertexId};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn v(i: u32) -> VertexId {
    VertexId(i)
}

fn z(n: usize) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::cyclic(n).unwrap())
}

fn klein() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::klein_four())
}

/// Girth of the realisation by breadth-first search from every vertex.
fn bfs_girth(q: &OneDimPoset) -> Option<usize> {
    let ids: Vec<VertexId> = q.small().iter().chain(q.big()).copied().collect();
    let at: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut adj = vec![Vec::new(); ids.len()];
    for &(s, b) in q.edges() {
        adj[at[&s]].push(at[&b]);
        adj[at[&b]].push(at[&s]);
    }
    let mut best: Option<usize> = None;
    for root in 0..ids.len() {
        let mut dist = vec![usize::MAX; ids.len()];
        let mut parent = vec![usize::MAX; ids.len()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                } else if parent[x] != y {
                    let len = dist[x] + dist[y] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// A proper triple exists at `w` iff for distinct smalls `x, y, t` below it
/// the third image meets `img(y)·img(x)` outside `img(x) ∪ img(y)`.
fn has_triple_at(gc: &GraphicalComplexOfGroups, j: usize) -> bool {
    let g = gc.group_at(j);
    let images: Vec<BTreeSet<usize>> =
        gc.incident(j).iter().map(|&(_, e)| gc.edge_image(e).iter().copied().collect()).collect();
    for x in 0..images.len() {
        for y in 0..images.len() {
            if x == y {
                continue;
            }
            let mut products = BTreeSet::new();
            for &a in &images[y] {
                for &b in &images[x] {
                    products.insert(g.mul(a, b));
                }
            }
            let mixed: BTreeSet<usize> =
                products.into_iter().filter(|p| !images[x].contains(p) && !images[y].contains(p)).collect();
            if (0..images.len()).any(|t| t != x && t != y && !mixed.is_disjoint(&images[t])) {
                return true;
            }
        }
    }
    false
}

fn has_triple(gc: &GraphicalComplexOfGroups) -> bool {
    let q = gc.poset();
    (q.small_count()..q.vertex_count()).any(|j| has_triple_at(gc, j))
}

fn table(rows: &[&[usize]]) -> GroupTable {
    GroupTable { name: "t".into(), order: rows.len(), table: rows.iter().map(|r| r.to_vec()).collect() }
}

/// The poset of simplices of a cycle with the given small and big ids.
fn ring(smalls: &[u32], bigs: &[u32]) -> Vec<(VertexId, VertexId)> {
    let n = smalls.len();
    (0..n).flat_map(|i| [(v(smalls[i]), v(bigs[i])), (v(smalls[(i + 1) % n]), v(bigs[i]))]).collect()
}

/// Two Z/2 smalls below two Klein four-group bigs, a 4-cycle.
fn square_complex(small0: Arc<FiniteGroup>, big2: Arc<FiniteGroup>, maps: [Vec<usize>; 4]) -> GraphicalComplexOfGroups {
    let poset =
        OneDimPoset::new([v(0), v(1)], [v(2), v(3)], [(v(0), v(2)), (v(1), v(2)), (v(0), v(3)), (v(1), v(3))]).unwrap();
    let groups = BTreeMap::from([(v(0), small0), (v(1), z(2)), (v(2), big2), (v(3), klein())]);
    let [a, b, c, d] = maps;
    let maps = BTreeMap::from([((v(0), v(2)), a), ((v(1), v(2)), b), ((v(0), v(3)), c), ((v(1), v(3)), d)]);
    GraphicalComplexOfGroups::new(poset, groups, maps).unwrap()
}

fn hexagon_graph() -> Vec<(usize, usize)> {
    (0..6).map(|i| (i, (i + 1) % 6)).collect()
}

fn generators() -> Vec<(&'static str, GraphicalComplexOfGroups)> {
    let q = poset::cycle_poset(6);
    let orders: BTreeMap<VertexId, Arc<FiniteGroup>> =
        q.small().iter().enumerate().map(|(i, &s)| (s, z(2 + i % 3))).collect();
    let labels = [3, 2, 4, 2, 3, 5];
    let coxeter: Vec<_> = hexagon_graph().into_iter().zip(labels).map(|((a, b), m)| (a, b, m)).collect();
    let curve = TorusCurve { direction: 0, offset: Hex::new(0, 0) };
    vec![
        ("graphical product", examples::graphical_product(q, &orders).unwrap()),
        ("racg 12-cycle", examples::racg_cycle(6).unwrap()),
        ("racg K(3,3)", examples::racg_bipartite(3, 3).unwrap()),
        ("coxeter hexagon", examples::coxeter_nerve(6, &coxeter).unwrap()),
        ("klein torus", examples::default_klein_four_torus()),
        ("torus double", examples::torus_double(&examples::smallest_doubling_torus(curve).unwrap(), curve).unwrap()),
    ]
}

fn criterion_1() -> Outcome {
    for (name, gc) in generators() {
        ensure!(gcog::validate(&gc).is_valid(), "{name}: {:?}", gcog::validate(&gc));
        ensure!(poset::check_convention(gc.poset()).passes(), "{name} breaks the poset convention");
    }

    // a non-associative loop of order 5: every element is its own inverse
    let loop5 = table(&[&[0, 1, 2, 3, 4], &[1, 0, 3, 4, 2], &[2, 4, 0, 1, 3], &[3, 2, 4, 0, 1], &[4, 3, 1, 2, 0]]);
    let m = &loop5.table;
    let rep = groups::validate_group(&loop5).unwrap();
    let assoc = rep.violations.iter().find_map(|x| match *x {
        AxiomViolation::Associativity { a, b, c } => Some((a, b, c)),
        _ => None,
    });
    ensure!(assoc.is_some_and(|(a, b, c)| m[m[a][b]][c] != m[a][m[b][c]]), "associativity witness {assoc:?}");

    let shifted = table(&[&[1, 0], &[0, 1]]);
    let rep = groups::validate_group(&shifted).unwrap();
    ensure!(rep.violations.contains(&AxiomViolation::IdentityLaw { element: 0 }), "identity law: {rep:?}");

    let absorbing = table(&[&[0, 1], &[1, 1]]);
    let rep = groups::validate_group(&absorbing).unwrap();
    ensure!(rep.violations.contains(&AxiomViolation::MissingInverse { element: 1 }), "inverse: {rep:?}");
    ensure!(FiniteGroup::from_table(absorbing).is_err(), "a non-group table was accepted");

    let overlap = OneDimPoset::new([v(0), v(1)], [v(1), v(2)], []);
    ensure!(overlap == Err(PosetError::KindOverlap { vertex: v(1) }), "kind overlap: {overlap:?}");

    let dup = OneDimPoset::new([v(0)], [v(1)], [(v(0), v(1)), (v(0), v(1))]);
    ensure!(dup == Err(PosetError::DuplicateIncidence { small: v(0), big: v(1) }), "duplicate: {dup:?}");

    let mut pendant = ring(&[0, 1, 2], &[3, 4, 5]);
    pendant.push((v(6), v(3)));
    let q = OneDimPoset::new([0, 1, 2, 6].map(v), [3, 4, 5].map(v), pendant).unwrap();
    let rep = poset::check_convention(&q);
    ensure!(rep.failures.contains(&ConventionFailure::ValenceOne { vertex: v(6) }), "valence one: {rep:?}");

    let mut bowtie = ring(&[0, 1, 2], &[3, 4, 5]);
    bowtie.extend(ring(&[0, 6, 7], &[8, 9, 10]));
    let q = OneDimPoset::new([0, 1, 2, 6, 7].map(v), [3, 4, 5, 8, 9, 10].map(v), bowtie).unwrap();
    let rep = poset::check_convention(&q);
    ensure!(rep.failures == vec![ConventionFailure::CutVertex { vertex: v(0) }], "cut vertex: {rep:?}");

    let mut apart = ring(&[0, 1, 2], &[3, 4, 5]);
    apart.extend(ring(&[6, 7, 8], &[9, 10, 11]));
    let q = OneDimPoset::new([0, 1, 2, 6, 7, 8].map(v), [3, 4, 5, 9, 10, 11].map(v), apart).unwrap();
    let rep = poset::check_convention(&q);
    let far = rep.failures.iter().find_map(|f| match *f {
        ConventionFailure::Disconnected { unreachable } => Some(unreachable.0),
        _ => None,
    });
    ensure!(far.is_some_and(|x| (6..12).contains(&x)), "disconnected: {rep:?}");

    let good = [vec![0, 1], vec![0, 2], vec![0, 1], vec![0, 2]];
    ensure!(gcog::validate(&square_complex(z(2), klein(), good.clone())).is_valid(), "baseline square is invalid");

    let check = |gc: GraphicalComplexOfGroups, expected: ComplexFailure| -> Result<(), String> {
        let rep = gcog::validate(&gc);
        ensure!(rep.failures.contains(&expected), "expected {expected:?}, got {rep:?}");
        Ok(())
    };
    let mut trivial = good.clone();
    trivial[0] = vec![0];
    trivial[2] = vec![0];
    check(square_complex(z(1), klein(), trivial), ComplexFailure::TrivialGroup { vertex: v(0) })?;

    let mut collapsed = good.clone();
    collapsed[0] = vec![0, 0];
    check(
        square_complex(z(2), klein(), collapsed),
        ComplexFailure::NotMonomorphism {
            small: v(0),
            big: v(2),
            violation: MonoViolation::NotInjective { a: 0, b: 1 },
        },
    )?;

    let onto = [vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 2]];
    check(
        square_complex(z(2), z(2), onto),
        ComplexFailure::NotProper { small: v(0), big: v(2), small_order: 2, big_order: 2 },
    )?;

    let mut same = good;
    same[1] = vec![0, 1];
    check(
        square_complex(z(2), klein(), same),
        ComplexFailure::ImagesMeet { big: v(2), smalls: (v(0), v(1)), shared: 1 },
    )?;

    Ok("6 generators valid; 12 violations rejected with witnesses".into())
}

fn criterion_2() -> Outcome {
    let torus = HexTorus::smallest_girth_six().poset().map_err(|e| e.to_string())?;
    let cert = poset::check_huge(&torus, 6);
    ensure!(cert.holds, "torus not 6-huge: {cert:?}");
    ensure!(cert.girth == Girth::Finite(12), "torus girth {}", cert.girth);
    ensure!(bfs_girth(&torus) == Some(12), "independent girth {:?}", bfs_girth(&torus));

    let hexagon = poset::cycle_poset(6);
    ensure!(poset::check_huge(&hexagon, 6).holds, "6-cycle poset not 6-huge");
    let seven = poset::check_huge(&hexagon, 7);
    ensure!(!seven.holds && seven.witness.as_ref().is_some_and(|c| c.len() == 12), "7-huge: {seven:?}");
    ensure!(bfs_girth(&hexagon) == Some(12), "independent girth of the hexagon");
    Ok("torus girth 12, 6-huge; hexagon 6-huge, not 7-huge".into())
}

fn criterion_3() -> Outcome {
    let angles = AngleAssignment::C6;
    ensure!(angles.small * 2 == 420 && angles.big * 3 == 420 && angles.cone * 6 == 420, "angle units");
    let six_huge: Vec<_> =
        generators().into_iter().filter(|(_, gc)| bfs_girth(gc.poset()).is_none_or(|g| g >= 12)).collect();
    let mut checked = 0;
    for (name, gc) in &six_huge {
        let cert = smallcancel::check_link_condition_complex(gc, angles);
        ensure!(cert.holds, "{name}: {:?}", cert.failures);
        for kind in ["cone", "small", "big"] {
            let present = cert.links.iter().any(|l| match l.site {
                LinkSite::Cone => kind == "cone",
                LinkSite::Small { .. } => kind == "small",
                LinkSite::Big { .. } => kind == "big",
                _ => false,
            });
            ensure!(present, "{name}: no {kind} link checked");
        }
        checked += 1;
    }
    ensure!(checked == 5, "{checked} generators are 6-huge, expected all but K(3,3)");

    let poset = OneDimPoset::new([v(0), v(1), v(2)], [v(3)], [(v(0), v(3)), (v(1), v(3)), (v(2), v(3))]).unwrap();
    let groups = BTreeMap::from([(v(0), z(2)), (v(1), z(2)), (v(2), z(2)), (v(3), klein())]);
    let maps = BTreeMap::from([((v(0), v(3)), vec![0, 2]), ((v(1), v(3)), vec![0, 2]), ((v(2), v(3)), vec![0, 3])]);
    let fixture = GraphicalComplexOfGroups::new(poset, groups, maps).unwrap();
    let cert = smallcancel::check_link_condition_complex(&fixture, angles);
    let failure = cert.failures.first().ok_or("fixture passed the link condition")?;
    ensure!(failure.site == LinkSite::Big { vertex: v(3) }, "failure at {:?}", failure.site);
    // four edges, each subtending the π/3 big-vertex angle
    let four_thirds_pi = 4 * 420 / 3;
    ensure!(failure.edges == Some(4) && failure.girth == Some(four_thirds_pi as u64), "fixture cycle {failure:?}");
    Ok(format!("{checked} six-huge generators pass; fixture fails with a 4-cycle of length 4π/3"))
}

fn random_complex(rng: &mut ChaCha8Rng, kind: usize) -> GraphicalComplexOfGroups {
    match kind {
        0 => {
            let q = poset::cycle_poset(rng.gen_range(3..8));
            let gs = q.small().iter().map(|&s| (s, z(rng.gen_range(2..6)))).collect();
            examples::graphical_product(q, &gs).unwrap()
        }
        1 => {
            let n = rng.gen_range(3..8);
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, rng.gen_range(2..7))).collect();
            examples::coxeter_nerve(n, &edges).unwrap()
        }
        2 => {
            // three Z/2 smalls below two copies of (Z/2)^3; a triple appears
            // exactly when the chosen involutions at some big are dependent
            let rows: Vec<Vec<usize>> = (0..8).map(|a| (0..8).map(|b| a ^ b).collect()).collect();
            let cube = Arc::new(
                FiniteGroup::from_table(GroupTable { name: "(Z/2)^3".into(), order: 8, table: rows }).unwrap(),
            );
            let poset =
                OneDimPoset::new([v(0), v(1), v(2)], [v(3), v(4)], (0..3).flat_map(|s| [(v(s), v(3)), (v(s), v(4))]))
                    .unwrap();
            let groups = BTreeMap::from([(v(0), z(2)), (v(1), z(2)), (v(2), z(2)), (v(3), cube.clone()), (v(4), cube)]);
            let mut maps = BTreeMap::new();
            for w in [3, 4] {
                let mut pool: Vec<usize> = (1..8).collect();
                pool.shuffle(rng);
                for s in 0..3 {
                    maps.insert((v(s), v(w)), vec![0, pool[s as usize]]);
                }
            }
            GraphicalComplexOfGroups::new(poset, groups, maps).unwrap()
        }
        _ => {
            let tori: Vec<HexTorus> =
                (7..12).flat_map(HexTorus::with_hex_count).filter(|t| t.check_girth_six().is_ok()).collect();
            examples::klein_four_torus(tori.choose(rng).unwrap()).unwrap()
        }
    }
}

fn criterion_4() -> Outcome {
    let q = poset::cycle_poset(5);
    let gs = q.small().iter().map(|&s| (s, z(4))).collect();
    let products = [
        examples::racg_cycle(6).unwrap(),
        examples::racg_bipartite(3, 4).unwrap(),
        examples::graphical_product(q, &gs).unwrap(),
    ];
    for gc in &products {
        ensure!(gcog::find_proper_triple(gc).is_none() && !has_triple(gc), "triple in a graphical product");
    }
    let two_smalls = [
        examples::coxeter_nerve(6, &hexagon_graph().into_iter().map(|(a, b)| (a, b, 5)).collect::<Vec<_>>()).unwrap(),
        examples::coxeter_nerve(4, &[(0, 1, 3), (1, 2, 4), (2, 3, 6), (3, 0, 2)]).unwrap(),
    ];
    for gc in &two_smalls {
        let q = gc.poset();
        ensure!(q.big().iter().all(|&w| q.smalls_below(w).len() == 2), "fixture has a big with other than 2 smalls");
        ensure!(gcog::find_proper_triple(gc).is_none() && !has_triple(gc), "triple with two small neighbours");
    }

    let gc = examples::default_klein_four_torus();
    let q = gc.poset();
    for &w in q.big() {
        let t = gcog::find_proper_triple_at(&gc, w).ok_or(format!("no triple at {w}"))?;
        ensure!(gcog::verify_triple(&gc, &t) && has_triple_at(&gc, q.index_of(w).unwrap()), "bad triple at {w}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x7e4);
    let mut with_triple = 0;
    for i in 0..20 {
        let gc = random_complex(&mut rng, i % 4);
        ensure!(gcog::validate(&gc).is_valid(), "random input {i} is invalid");
        let expected = !has_triple(&gc);
        ensure!(gcog::check_t4(&gc).holds == expected, "T(4) disagrees on random input {i}");
        with_triple += usize::from(!expected);
    }
    ensure!(with_triple > 0 && with_triple < 20, "random inputs are not mixed: {with_triple}/20 with triples");
    Ok(format!(
        "no false triples; all {} Klein bigs witnessed; T(4) agrees on 20 ({with_triple} with triples)",
        q.big().len()
    ))
}

/// Vertex and edge counts of the coset graph link at a big vertex.
fn big_link_size(gc: &GraphicalComplexOfGroups, j: usize) -> (usize, usize) {
    let order = gc.group_at(j).order();
    let below = gc.incident(j);
    let cosets: usize = below.iter().map(|&(s, _)| order / gc.group_at(s).order()).sum();
    (order + cosets, order * below.len())
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    for (name, gc) in [("racg", examples::racg_cycle(6).unwrap()), ("klein", examples::default_klein_four_torus())] {
        let ball = develop_ball(&gc, 3).map_err(|e| e.to_string())?;
        for (what, rep) in [
            ("links", develop::check_links(&ball)),
            ("coloring", develop::check_type_coloring(&ball)),
            ("geodesic completeness", develop::check_geodesic_completeness(&ball)),
        ] {
            ensure!(rep.passes() && rep.checked > 0, "{name} {what}: {:?}", rep.failures.first());
        }
        let mut bigs = 0;
        for i in ball.instances().filter(|&i| ball.is_saturated(i) && ball.instance_type(i) == VertexType::Big) {
            let link = develop::link_graph(&ball, LinkCentre::Instance(i));
            let size = (link.vertices.len(), link.graph.edge_count());
            ensure!(size == big_link_size(&gc, ball.instance_vertex(i)), "{name}: big link of size {size:?}");
            bigs += 1;
        }
        ensure!(bigs > 0, "{name}: no saturated big instance");
        let first = serde_json::to_string(&ball).unwrap();
        for _ in 0..4 {
            ensure!(
                serde_json::to_string(&develop_ball(&gc, 3).unwrap()).unwrap() == first,
                "{name} not deterministic"
            );
        }
        notes.push(format!("{name} {} cells", ball.cell_count()));
    }
    Ok(format!("{}; 5 identical runs each", notes.join(", ")))
}

fn criterion_6() -> Outcome {
    for (name, gc) in [("racg", examples::racg_cycle(6).unwrap()), ("klein", examples::default_klein_four_torus())] {
        let ball = develop_ball(&gc, 3).unwrap();
        let pieces = smallcancel::enumerate_pieces(&ball);
        ensure!(!pieces.pieces.is_empty(), "{name}: no pieces");
        ensure!(pieces.pieces.iter().all(|p| p.len() <= 2), "{name}: piece longer than 2");
        let ck = smallcancel::check_ck(&ball, 6, false);
        ensure!(ck.holds && ck.cells_checked > 0, "{name}: C(6) fails {:?}", ck.witness);
        let girth = ck.girth.ok_or("no boundary cycle")?;
        ensure!(ck.cprime_holds && ck.max_piece_len * 6 <= girth, "{name}: C' ratio {}/{girth}", ck.max_piece_len);
    }
    let square = develop_ball(&examples::racg_bipartite(2, 2).unwrap(), 3).unwrap();
    ensure!(smallcancel::check_ck(&square, 4, true).holds, "4-gon fails C(4)");
    ensure!(!smallcancel::check_ck(&square, 6, false).holds, "4-gon passes C(6)");
    Ok("pieces ≤ 2, C(6) and C' ≤ 1/6 hold; 4-gon is C(4) but not C(6)".into())
}

fn criterion_7() -> Outcome {
    let q = poset::cycle_poset(6);
    let gs = q.small().iter().map(|&s| (s, z(3))).collect();
    let decorated = examples::graphical_product(q, &gs).unwrap();
    let mut dims = Vec::new();
    for gc in [examples::racg_cycle(6).unwrap(), examples::default_klein_four_torus(), decorated] {
        let formula = (0..gc.poset().vertex_count()).map(|i| gc.group_at(i).order()).max().unwrap() - 1;
        let rep = wise::nerve_dimension(&develop_ball(&gc, 2).unwrap());
        ensure!(rep.dimension == Some(formula) && !rep.lower_bound_only, "dimension {rep:?}, expected {formula}");
        dims.push(formula);
    }
    ensure!(dims == [3, 3, 8], "dimensions {dims:?}");

    for (gc, k) in [
        (examples::racg_cycle(6).unwrap(), 6),
        (examples::default_klein_four_torus(), 6),
        (examples::racg_cycle(7).unwrap(), 7),
    ] {
        ensure!(poset::check_huge(gc.poset(), k).holds, "input is not {k}-huge");
        let cert = wise::check_k_largeness(&wise::build_nerve(&develop_ball(&gc, 3).unwrap()), k);
        ensure!(cert.holds && cert.interior_checked > 0, "{k}-largeness: {cert:?}");
    }
    Ok(format!("dimensions {dims:?}; 6-large and 7-large"))
}

fn criterion_8() -> Outcome {
    for (name, gc) in [("racg", examples::racg_cycle(6).unwrap()), ("klein", examples::default_klein_four_torus())] {
        let ball = develop_ball(&gc, 3).unwrap();
        let r = wise::retriangulate_valence2(&ball).map_err(|e| e.to_string())?;
        let rep = wise::check_retriangulation(&ball, &r);
        ensure!(rep.cone_link_girth_before == Some(12), "{name}: girth before {:?}", rep.cone_link_girth_before);
        ensure!(rep.cone_link_girths_after == vec![Some(6)], "{name}: girths after {:?}", rep.cone_link_girths_after);
        ensure!(rep.passes() && rep.interior_checked > 0, "{name}: {rep:?}");
    }
    Ok("cone-link girth 12 → 6; interior links 6-large".into())
}

fn criterion_9() -> Outcome {
    let gc = examples::default_klein_four_torus();
    let torus = flats::recognise_torus(&gc).ok_or("torus not recognised")?;
    let patch = flats::build_hex_patch(3, 3, &torus).map_err(|e| e.to_string())?;
    let labels = flats::label_patch(&gc, &patch).map_err(|e| e.to_string())?;
    let ball = develop_focused(&gc, 6, &labels.labels).map_err(|e| e.to_string())?;
    let consistency = flats::verify_consistency(&gc, &patch, &labels, Some(&ball));
    ensure!(consistency == Consistency::Consistent, "labelling: {consistency:?}");
    let rep = flats::embed_flat(&ball, &patch, &labels);
    ensure!(rep.well_defined && rep.injective, "embedding not injective or not well defined");
    let (a, turn) = (AngleAssignment::C6, smallcancel::FULL_TURN);
    ensure!(12 * a.cone == turn && 4 * a.small == turn && 6 * a.big == turn, "flat angles do not close up");
    ensure!(rep.angle_sums_ok, "angle sums at interior patch vertices");
    ensure!(rep.triples_ok && rep.triples.len() == patch.corners.len(), "{} triples", rep.triples.len());
    ensure!(rep.triples.iter().all(|t| gcog::verify_triple(&gc, t)), "an invalid triple");
    ensure!(rep.verified(), "{:?}", rep.failures);
    ensure!(matches!(gcog::classify(&gc), Verdict::FlatFound { .. }), "classify did not find the flat");
    Ok(format!("9 hexes embedded, {} tiling vertices carry triples, FlatFound", rep.triples.len()))
}

fn criterion_10() -> Outcome {
    let cox =
        examples::coxeter_nerve(6, &hexagon_graph().into_iter().map(|(a, b)| (a, b, 3)).collect::<Vec<_>>()).unwrap();
    for gc in [examples::racg_cycle(6).unwrap(), examples::racg_bipartite(3, 3).unwrap(), cox] {
        ensure!(!has_triple(&gc), "fixture has triples");
        let search = wise::find_cut_up_tetrahedron(&wise::build_nerve(&develop_ball(&gc, 3).unwrap()));
        ensure!(search.witness.is_none(), "tetrahedron on a triple-free ball: {:?}", search.witness);
    }
    let nerve = wise::build_nerve(&develop_ball(&examples::default_klein_four_torus(), 2).unwrap());
    let found = wise::find_cut_up_tetrahedron(&nerve).witness.ok_or("no tetrahedron on the Klein torus")?;
    ensure!(found.isometric, "witness is not isometric");
    let [a, b, c] = found.central.map(|x| x.0 as usize);
    let [s1, s2, s3] = found.sides.map(|x| x.0 as usize);
    ensure!(nerve.is_simplex(&[a, b, c]), "central triangle missing");
    ensure!(
        nerve.is_simplex(&[s1, a, b]) && nerve.is_simplex(&[s2, b, c]) && nerve.is_simplex(&[s3, a, c]),
        "side triangle missing"
    );
    Ok(format!("none on 3 triple-free balls; Klein witness {:?} + {:?}", found.central, found.sides))
}

fn criterion_11() -> Outcome {
    let gc = examples::racg_cycle(6).unwrap();
    let ball = develop_ball(&gc, 6).map_err(|e| e.to_string())?;
    let w = develop::infinite_order_witness(&ball, v(0), v(3), None, 3).map_err(|e| e.to_string())?;
    ensure!(w.poset_distance >= 6, "distance {}", w.poset_distance);
    ensure!(w.cone_geodesic && w.small_geodesic, "axis not locally geodesic: {w:?}");
    let distinct: BTreeSet<_> = w.powers.iter().collect();
    ensure!(w.powers.len() == 3 && distinct.len() == 3 && !w.powers.contains(&ball.base()), "powers {:?}", w.powers);
    ensure!(w.verified(), "{w:?}");
    Ok(format!("3 distinct powers in a {}-cell ball", ball.cell_count()))
}

fn criterion_12() -> Outcome {
    let ball = develop_ball(&examples::racg_bipartite(2, 2).unwrap(), 3).unwrap();
    let r = wise::retriangulate_valence2(&ball).map_err(|e| e.to_string())?;
    // a 7 × 7 block of squares: 49 centres, 64 corners, 4 spokes per square
    // and 2 · 8 · 7 grid edges
    let side = 7;
    let vertices = side * side + (side + 1) * (side + 1);
    let edges = 4 * side * side + 2 * (side + 1) * side;
    ensure!(
        (r.vertices.len(), r.graph.edge_count()) == (vertices, edges),
        "sizes {} {}",
        r.vertices.len(),
        r.graph.edge_count()
    );
    ensure!(wise::is_square_grid(&r, 3), "not isomorphic to the square grid");
    Ok(format!("{vertices} vertices, {edges} edges, isomorphic to the grid"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("axiom validation", criterion_1),
        ("hugeness", criterion_2),
        ("link conditions", criterion_3),
        ("proper triples", criterion_4),
        ("development", criterion_5),
        ("small cancellation", criterion_6),
        ("wise complex", criterion_7),
        ("retriangulation", criterion_8),
        ("flats", criterion_9),
        ("cut-up tetrahedron", criterion_10),
        ("infinite order", criterion_11),
        ("square grid", criterion_12),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {:>2} {name}: PASS ({note}) [{secs:.2}s]", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}) [{secs:.2}s]", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
