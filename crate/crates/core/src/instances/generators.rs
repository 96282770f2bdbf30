use std::collections::BTreeMap;

use super::{
    default_engine, Cmp, InstanceBundle, PartitionExpectation, Provenance, Quantity, ScalarExpectation, Target,
};
use crate::criteria::Criterion;
use crate::error::{Error, Result};
use crate::linkage::{Clustering, LinkageRule};
use crate::metric::{harmonic, is_metric, DistanceSource, Norm, METRIC_TOL};

fn tol_for(v: f64) -> f64 {
    1e-9 * v.abs().max(1.0)
}

fn scalar(name: &str, quantity: Quantity, cmp: Cmp, value: f64, provenance: Provenance) -> ScalarExpectation {
    ScalarExpectation { name: name.to_string(), quantity, cmp, value, tol: tol_for(value), provenance }
}

fn cut(rule: LinkageRule, n: usize, k: usize) -> Target {
    Target::Cut { rule, engine: default_engine(n), k }
}

fn crit(c: Criterion, t: Target) -> Quantity {
    Quantity::Criterion(c, t)
}

fn partition(label: &str, n: usize, blocks: &[Vec<usize>]) -> Result<Target> {
    Ok(Target::Partition { label: label.to_string(), clustering: Clustering::from_blocks(n, blocks)? })
}

fn singletons(v: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    v.iter().map(|&i| vec![i])
}

fn concat(parts: &[&[usize]]) -> Vec<usize> {
    let mut v: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    v.sort_unstable();
    v
}

struct Draft {
    name: &'static str,
    params: BTreeMap<String, String>,
    groups: Vec<(String, Vec<usize>)>,
    partitions: Vec<PartitionExpectation>,
    scalars: Vec<ScalarExpectation>,
    notes: Vec<String>,
}

impl Draft {
    fn new(name: &'static str, params: &[(&str, String)]) -> Self {
        Draft {
            name,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            groups: Vec::new(),
            partitions: Vec::new(),
            scalars: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Appends a group of `size` consecutive indices and returns it.
    fn group(&mut self, name: impl Into<String>, size: usize) -> Vec<usize> {
        let start = self.groups.last().map_or(0, |(_, v)| v.last().map_or(0, |&l| l + 1));
        let v: Vec<usize> = (start..start + size).collect();
        self.groups.push((name.into(), v.clone()));
        v
    }

    fn expect_cut(
        &mut self,
        name: impl Into<String>,
        rule: LinkageRule,
        n: usize,
        k: usize,
        blocks: &[Vec<usize>],
        provenance: Provenance,
    ) -> Result<()> {
        self.partitions.push(PartitionExpectation {
            name: name.into(),
            rule,
            engine: default_engine(n),
            k,
            expected: Clustering::from_blocks(n, blocks)?,
            provenance,
        });
        Ok(())
    }

    fn finish(
        self,
        source: DistanceSource,
        point_order: impl Into<String>,
        declared_metric: bool,
    ) -> Result<InstanceBundle> {
        // Matrix-backed constructions verify their own metricity.
        if !source.is_feature_backed() && is_metric(&source, METRIC_TOL) != declared_metric {
            return Err(Error::InvalidSource(format!(
                "{} instance expected to be {}a metric",
                self.name,
                if declared_metric { "" } else { "not " }
            )));
        }
        let mut scalars = self.scalars;
        scalars.push(scalar(
            "metricity",
            Quantity::IsMetric,
            Cmp::Eq,
            f64::from(u8::from(declared_metric)),
            Provenance::ClosedForm,
        ));
        Ok(InstanceBundle {
            name: self.name.to_string(),
            params: self.params,
            source: source.with_name(self.name),
            groups: self.groups,
            point_order: point_order.into(),
            declared_metric,
            partitions: self.partitions,
            scalars,
            notes: self.notes,
        })
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Group sizes and positions of the line instance with `t` groups:
/// `|A_0| = 1`, `|A_i| = (i+1)! - i!`, `p_0 = 0`, `p_1 = 1` and
/// `p_i = p_{i-1} + avg(A_{i-1}, B_{i-2}) + eps` where `B_i = A_0 ∪ ... ∪ A_i`.
pub fn ics_layout(t: usize, eps: f64) -> (Vec<usize>, Vec<f64>) {
    let sizes: Vec<usize> = (0..t).map(|i| if i == 0 { 1 } else { factorial(i + 1) - factorial(i) }).collect();
    let mut pos = vec![0.0; t];
    if t > 1 {
        pos[1] = 1.0;
    }
    for i in 2..t {
        pos[i] = pos[i - 1] + avg_to_prefix(&sizes, &pos, i - 1) + eps;
    }
    (sizes, pos)
}

/// `avg(A_i, B_{i-1})` on the line: `p_i` minus the mean position of `B_{i-1}`.
fn avg_to_prefix(sizes: &[usize], pos: &[f64], i: usize) -> f64 {
    let count: usize = sizes[..i].iter().sum();
    let weighted: f64 = sizes[..i].iter().zip(&pos[..i]).map(|(&s, &p)| s as f64 * p).sum();
    pos[i] - weighted / count as f64
}

/// Points on a line in groups `A_0..A_{t-1}` whose average-link execution
/// absorbs one group at a time into the growing prefix, so the 2-cut has a
/// large cohesion-to-separation ratio while `(A_0, rest)` stays bounded.
///
/// With `eps > 0` every merge between groups is strict. With `eps = 0`
/// the pair `(A_i, A_{i+1})` ties with `(B_{i-1}, A_i)`, and the
/// lexicographic tie-break picks the former once `t >= 4`, so cut
/// expectations below `k = t - 1` are only attached when `eps > 0` or `t <= 3`.
pub fn gen_ics(t: usize, eps: f64) -> Result<InstanceBundle> {
    if t < 2 {
        return Err(Error::InvalidArgument(format!("ics needs t >= 2, got {t}")));
    }
    if t > 8 {
        return Err(Error::BudgetExceeded(format!("ics with t = {t} has {} points", factorial(t))));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("ics needs finite eps >= 0, got {eps}")));
    }
    let (sizes, pos) = ics_layout(t, eps);
    let n = factorial(t);
    let mut d = Draft::new("ics", &[("t", t.to_string()), ("eps", eps.to_string())]);
    let groups: Vec<Vec<usize>> = sizes.iter().enumerate().map(|(i, &s)| d.group(format!("A{i}"), s)).collect();
    let rows: Vec<Vec<f64>> = groups.iter().enumerate().flat_map(|(i, g)| vec![vec![pos[i]]; g.len()]).collect();

    let strict = eps > 0.0 || t <= 3;
    for k in 2..=t {
        if !strict && k < t - 1 {
            continue;
        }
        let prefix: Vec<usize> = groups[..=t - k].concat();
        let mut blocks = vec![prefix];
        blocks.extend(groups[t - k + 1..].iter().cloned());
        d.expect_cut(format!("al_cut_k{k}"), LinkageRule::Average, n, k, &blocks, Provenance::ClosedForm)?;
    }
    if !strict {
        d.notes.push(format!(
            "eps = 0 ties (A_i, A_i+1) with (B_i-1, A_i); cuts below k = {} are left unchecked",
            t - 1
        ));
    }

    let rest: Vec<usize> = groups[1..].concat();
    let rival = partition("(A0, rest)", n, &[groups[0].clone(), rest])?;
    // diam(B_{t-2}) = p_{t-2}; sep_min = avg(A_{t-1}, B_{t-2})
    let sep = avg_to_prefix(&sizes, &pos, t - 1);
    let cs_al = pos[t - 2] / sep;
    let rest_count = (n - 1) as f64;
    let rest_mean: f64 = sizes[1..].iter().zip(&pos[1..]).map(|(&s, &p)| s as f64 * p).sum::<f64>() / rest_count;
    let cs_rival = (pos[t - 1] - pos[1]) / rest_mean;
    let al2 = cut(LinkageRule::Average, n, 2);
    if strict {
        d.scalars.push(scalar(
            "sep_min_al_k2",
            crit(Criterion::SepMin, al2.clone()),
            Cmp::Eq,
            sep,
            Provenance::ClosedForm,
        ));
        d.scalars.push(scalar(
            "cs_dm_al_k2",
            crit(Criterion::CsRatioDm, al2.clone()),
            Cmp::Eq,
            cs_al,
            Provenance::ClosedForm,
        ));
        if t >= 3 {
            d.scalars.push(scalar(
                "cs_dm_al_k2_times_ln_t_over_t",
                Quantity::scaled(crit(Criterion::CsRatioDm, al2.clone()), (t as f64).ln() / t as f64),
                Cmp::Ge,
                0.24,
                Provenance::Regression,
            ));
            d.scalars.push(scalar(
                "cs_dm_al_over_rival",
                Quantity::ratio(crit(Criterion::CsRatioDm, al2), crit(Criterion::CsRatioDm, rival.clone())),
                Cmp::Eq,
                cs_al / cs_rival,
                Provenance::ClosedForm,
            ));
        }
    }
    d.scalars.push(scalar("cs_dm_rival", crit(Criterion::CsRatioDm, rival), Cmp::Eq, cs_rival, Provenance::ClosedForm));
    d.notes.push(format!(
        "positions follow the recurrence: p = [{}]",
        pos.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(", ")
    ));

    let src = DistanceSource::from_features(&rows, Norm::L1)?;
    d.finish(src, "A0, A1, ..., A(t-1) in index order; each group shares one position", true)
}

/// The line instance with `t = k` plus satellites `x_0..x_{k-1}`, one per
/// group: `dist(x_i, A_j) = |p_i - p_j| + k + 1 + eps` and
/// `dist(x_i, x_j) = |p_i - p_j| + 2(k + 1 + eps)`. Average linkage builds
/// the whole line before touching a satellite, so its `(k+1)`-cut is
/// `(B_{k-1}, {x_0}, ..., {x_{k-1}})`, while pairing each satellite with its
/// group has diameter `k + 1 + eps`.
pub fn gen_ics_augmented(k: usize, eps: f64) -> Result<InstanceBundle> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("ics_augmented needs k >= 2, got {k}")));
    }
    if k > 7 {
        return Err(Error::BudgetExceeded(format!("ics_augmented with k = {k} has {} points", factorial(k) + k)));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("ics_augmented needs eps > 0, got {eps}")));
    }
    let (sizes, pos) = ics_layout(k, eps);
    let line_n = factorial(k);
    let n = line_n + k;
    let mut d = Draft::new("ics_augmented", &[("k", k.to_string()), ("eps", eps.to_string())]);
    let groups: Vec<Vec<usize>> = sizes.iter().enumerate().map(|(i, &s)| d.group(format!("A{i}"), s)).collect();
    let sats: Vec<usize> = (0..k).map(|i| d.group(format!("x{i}"), 1)[0]).collect();

    // group index of each point; satellites are k..2k
    let mut which = vec![0usize; n];
    for (g, pts) in groups.iter().enumerate() {
        for &p in pts {
            which[p] = g;
        }
    }
    for (i, &s) in sats.iter().enumerate() {
        which[s] = k + i;
    }
    let leg = k as f64 + 1.0 + eps;
    let src = DistanceSource::from_fn(n, |a, b| {
        let (ga, gb) = (which[a], which[b]);
        let (sa, sb) = (ga >= k, gb >= k);
        let gap = (pos[ga % k] - pos[gb % k]).abs();
        gap + leg * (usize::from(sa) + usize::from(sb)) as f64
    })?;

    let line: Vec<usize> = (0..line_n).collect();
    let mut blocks = vec![line];
    blocks.extend(singletons(&sats));
    d.expect_cut(format!("al_cut_k{}", k + 1), LinkageRule::Average, n, k + 1, &blocks, Provenance::ClosedForm)?;

    let pairing: Vec<Vec<usize>> = groups.iter().zip(&sats).map(|(g, &s)| concat(&[g, &[s]])).collect();
    let pairing = partition("(x_i + A_i)", n, &pairing)?;
    let al = cut(LinkageRule::Average, n, k + 1);
    let diam_line = pos[k - 1];
    d.scalars.push(scalar(
        "max_diam_al",
        crit(Criterion::MaxDiam, al.clone()),
        Cmp::Eq,
        diam_line,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "max_diam_pairing",
        crit(Criterion::MaxDiam, pairing.clone()),
        Cmp::Eq,
        leg,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "max_diam_al_over_pairing",
        Quantity::ratio(crit(Criterion::MaxDiam, al), crit(Criterion::MaxDiam, pairing)),
        Cmp::Eq,
        diam_line / leg,
        Provenance::ClosedForm,
    ));
    d.finish(src, "the line instance's groups A0..A(k-1), then satellites x0..x(k-1)", true)
}

/// `S_1` and `S_2` with `(k-1)/2` points each (internal distance `eps`),
/// `S_3` with `k-2` points (internal distance 1), and distance `D` across
/// groups. All three rules cut it into `(S_1, S_2, {s_1}, ..., {s_{k-2}})`.
pub fn gen_sep(k: usize, big_d: f64, eps: f64) -> Result<InstanceBundle> {
    if k < 5 || k % 2 == 0 {
        return Err(Error::InvalidArgument(format!("sep needs an odd k >= 5, got {k}")));
    }
    if !(eps > 0.0 && eps < 1.0 && big_d > 1.0 && big_d.is_finite()) {
        return Err(Error::InvalidArgument(format!("sep needs 0 < eps < 1 < D, got eps = {eps}, D = {big_d}")));
    }
    let h = (k - 1) / 2;
    let n = 2 * k - 3;
    let mut d = Draft::new("sep", &[("k", k.to_string()), ("d", big_d.to_string()), ("eps", eps.to_string())]);
    let s1 = d.group("S1", h);
    let s2 = d.group("S2", h);
    let s3 = d.group("S3", k - 2);
    let mut which = vec![0u8; n];
    for (g, pts) in [&s1, &s2, &s3].into_iter().enumerate() {
        for &p in pts {
            which[p] = g as u8;
        }
    }
    let src = DistanceSource::from_fn(n, |a, b| match (which[a], which[b]) {
        (2, 2) => 1.0,
        (x, y) if x == y => eps,
        _ => big_d,
    })?;

    let mut blocks = vec![s1.clone(), s2.clone()];
    blocks.extend(singletons(&s3));
    for rule in LinkageRule::ALL {
        d.expect_cut(format!("{rule}_cut_k{k}"), rule, n, k, &blocks, Provenance::ClosedForm)?;
    }

    let pairs = |m: usize| (m * m.saturating_sub(1) / 2) as f64;
    let kf = k as f64;
    // cut: (S1,S2) and each block against every S3 singleton are at D; S3 pairs at 1
    let sep_al = (big_d * (1.0 + 2.0 * (kf - 2.0)) + pairs(k - 2)) / pairs(k);
    // rival: S3 whole plus k-1 singletons from S1 ∪ S2
    let sep_rival = (2.0 * pairs(h) * eps + (h * h) as f64 * big_d + (kf - 1.0) * big_d) / pairs(k);
    let mut rival_blocks = vec![s3.clone()];
    rival_blocks.extend(singletons(&s1));
    rival_blocks.extend(singletons(&s2));
    let rival = partition("(S3, singletons)", n, &rival_blocks)?;

    // B_1 = {s_1}; B_i = {s_i, u_i} for 2 <= i <= k-2 with the u_i drawn
    // from S1 then S2; B_{k-1} and B_k hold the last point of S1 and of S2.
    let mut spare: Vec<usize> = s1[..h - 1].iter().chain(&s2[..h - 1]).copied().collect();
    spare.reverse();
    let mut b_blocks = vec![vec![s3[0]]];
    for &s in &s3[1..] {
        b_blocks.push(vec![s, spare.pop().expect("k-3 spare points")]);
    }
    b_blocks.push(vec![s1[h - 1]]);
    b_blocks.push(vec![s2[h - 1]]);
    let b = partition("B", n, &b_blocks)?;

    let al = cut(LinkageRule::Average, n, k);
    d.scalars.push(scalar("sep_min_al", crit(Criterion::SepMin, al.clone()), Cmp::Eq, 1.0, Provenance::ClosedForm));
    d.scalars.push(scalar("max_diam_al", crit(Criterion::MaxDiam, al.clone()), Cmp::Eq, eps, Provenance::ClosedForm));
    d.scalars.push(scalar("sep_av_al", crit(Criterion::SepAv, al.clone()), Cmp::Eq, sep_al, Provenance::ClosedForm));
    d.scalars.push(scalar(
        "sep_av_rival",
        crit(Criterion::SepAv, rival.clone()),
        Cmp::Eq,
        sep_rival,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "sep_av_al_over_rival",
        Quantity::ratio(crit(Criterion::SepAv, al), crit(Criterion::SepAv, rival)),
        Cmp::Eq,
        sep_al / sep_rival,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "sep_min_b",
        crit(Criterion::SepMin, b),
        Cmp::Eq,
        (big_d + eps) / 2.0,
        Provenance::ClosedForm,
    ));
    d.notes.push(
        "every distance is at most D, so sep_av of any clustering is at most D and the \
         cut's sep_av ratio against any rival is at least (4k-6)/(k(k-1))"
            .into(),
    );
    d.finish(src, "S1, S2, then S3 = s_1..s_(k-2)", true)
}

/// `x_1 = 1`, `x_i = x_{i-1} + 1 - i eps`: gaps shrink left to right, so
/// single linkage peels off `x_1, x_2, ...` as singletons and keeps the
/// long tail together.
pub fn gen_sl_line(n: usize, eps: f64) -> Result<InstanceBundle> {
    if n < 6 {
        return Err(Error::InvalidArgument(format!("sl_line needs n >= 6, got {n}")));
    }
    if !(eps > 0.0 && (n as f64 + 1.0) * eps < 1.0) {
        return Err(Error::InvalidArgument(format!("sl_line needs 0 < eps and (n+1) eps < 1, got eps = {eps}")));
    }
    let mut d = Draft::new("sl_line", &[("n", n.to_string()), ("eps", eps.to_string())]);
    let pts = d.group("X", n);
    let mut xs = vec![1.0];
    for i in 2..=n {
        let prev = xs[i - 2];
        xs.push(prev + 1.0 - i as f64 * eps);
    }
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    for k in 3..=n / 2 {
        let mut blocks: Vec<Vec<usize>> = singletons(&pts[..k - 1]).collect();
        blocks.push(pts[k - 1..].to_vec());
        d.expect_cut(format!("single_cut_k{k}"), LinkageRule::Single, n, k, &blocks, Provenance::ClosedForm)?;
        d.scalars.push(scalar(
            &format!("cs_av_single_k{k}"),
            crit(Criterion::CsRatioAv, cut(LinkageRule::Single, n, k)),
            Cmp::Ge,
            (n - k) as f64 / 8.0,
            Provenance::TheoreticalBound,
        ));
    }
    if n >= 12 {
        d.scalars.push(scalar(
            "cs_av_single_over_average_k3",
            Quantity::ratio(
                crit(Criterion::CsRatioAv, cut(LinkageRule::Single, n, 3)),
                crit(Criterion::CsRatioAv, cut(LinkageRule::Average, n, 3)),
            ),
            Cmp::Ge,
            2.0,
            Provenance::EngineRun,
        ));
    }
    let src = DistanceSource::from_features(&rows, Norm::L1)?;
    d.finish(src, "x_1..x_n left to right", true)
}

/// Blocks `A, B, C, D, E` in `R^{p+1}` under the l1 norm with
/// `t = 2^m - 1` and `p = 2(t^2 + t)`.
///
/// The clustering `(A∪C, B∪D, e_1, ..., e_{k-3}, E_{k-2})` has
/// `avg(A∪C, B∪D) <= 3` and `avg(E_{k-2}) = 3t`. Complete linkage does not
/// produce it: points of `A∪B∪C∪D` are at most `2t+1` apart, below the
/// `3t` separating points of `E`, so complete linkage joins all four
/// blocks before any point of `E`. The bundle checks the bounds on the
/// clustering itself and records complete linkage's actual 2-cut.
pub fn gen_cl_l1(m: usize) -> Result<InstanceBundle> {
    if !(2..=3).contains(&m) {
        return Err(Error::InvalidArgument(format!("cl_l1 supports m in 2..=3, got {m}")));
    }
    let t = (1usize << m) - 1;
    let p = 2 * (t * t + t);
    let n = 2 * p;
    let dim = p + 1;
    let tf = t as f64;
    let mut d = Draft::new("cl_l1", &[("m", m.to_string())]);
    let a = d.group("A", t);
    let b = d.group("B", t);
    let c = d.group("C", t * t);
    let dd = d.group("D", t * t);
    let e = d.group("E", p);

    let mut data = vec![0.0; n * dim];
    let mut first = |i: usize, x: f64| data[i * dim] = x;
    for (r, &i) in a.iter().enumerate() {
        first(i, r as f64 + 1.5);
    }
    for (r, &i) in b.iter().enumerate() {
        first(i, -(r as f64 + 1.5));
    }
    for &i in &c {
        first(i, 0.5);
    }
    for &i in &dd {
        first(i, -0.5);
    }
    for (r, &i) in e.iter().enumerate() {
        data[i * dim] = tf * tf;
        data[i * dim + r + 1] = 1.5 * tf;
    }
    let src = DistanceSource::from_flat_features(data, dim, Norm::L1)?;

    let ac = concat(&[&a, &c]);
    let bd = concat(&[&b, &dd]);
    let k = 4;
    let mut paper_blocks = vec![ac.clone(), bd.clone()];
    paper_blocks.extend(singletons(&e[..k - 3]));
    paper_blocks.push(e[k - 3..].to_vec());
    let paper = partition("(A+C, B+D, e_1.., E_k-2)", n, &paper_blocks)?;

    // closed-form avg(A∪C, B∪D): sum the four cross blocks on the first axis
    let ai: Vec<f64> = (1..=t).map(|i| i as f64 + 0.5).collect();
    let sum_a: f64 = ai.iter().sum();
    let t2 = (t * t) as f64;
    // A×B, A×D and C×B, C×D
    let cross = 2.0 * tf * sum_a + 2.0 * (t2 * sum_a + t2 * tf * 0.5) + t2 * t2;
    let avg_acbd = cross / ((t2 + tf) * (t2 + tf));

    d.scalars.push(scalar(
        "avg_between_ac_bd_bound",
        Quantity::AvgBetween(ac.clone(), bd.clone()),
        Cmp::Le,
        3.0,
        Provenance::TheoreticalBound,
    ));
    d.scalars.push(scalar(
        "avg_between_ac_bd",
        Quantity::AvgBetween(ac.clone(), bd.clone()),
        Cmp::Eq,
        avg_acbd,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "avg_within_tail",
        Quantity::AvgWithin(e[k - 3..].to_vec()),
        Cmp::Eq,
        3.0 * tf,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "cs_av_paper_clustering",
        crit(Criterion::CsRatioAv, paper),
        Cmp::Ge,
        tf / 3.0,
        Provenance::TheoreticalBound,
    ));
    let core = concat(&[&a, &b, &c, &dd]);
    d.expect_cut("complete_cut_k2", LinkageRule::Complete, n, 2, &[core, e.clone()], Provenance::ClosedForm)?;
    d.scalars.push(scalar(
        "diam_core",
        Quantity::Diam(concat(&[&a, &b])),
        Cmp::Eq,
        2.0 * tf + 1.0,
        Provenance::ClosedForm,
    ));
    d.notes.push(format!(
        "complete linkage joins A, B, C, D (diameter {}) before any E pair (distance {}), \
         so its k-cuts never separate A+C from B+D",
        2 * t + 1,
        3 * t
    ));
    d.finish(src, "A (a_1..a_t), B, C, D, then E (e_1..e_p)", true)
}

/// Two tight groups `X`, `Y` of `(n-1)/2` points (distance 1 inside, 2
/// across) and a far point `z` at distance `D > n^2` from everything.
/// Random hierarchies usually put `z` in a shared block; average linkage
/// never does before the last merge.
pub fn gen_random_bad(n: usize, big_d: f64) -> Result<InstanceBundle> {
    if n < 5 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("random_bad needs an odd n >= 5, got {n}")));
    }
    if !(big_d > (n * n) as f64 && big_d.is_finite()) {
        return Err(Error::InvalidArgument(format!("random_bad needs D > n^2 = {}, got {big_d}", n * n)));
    }
    let h = (n - 1) / 2;
    let mut d = Draft::new("random_bad", &[("n", n.to_string()), ("d", big_d.to_string())]);
    let x = d.group("X", h);
    let y = d.group("Y", h);
    let z = d.group("z", 1)[0];
    let src = DistanceSource::from_fn(n, |a, b| {
        if a == z || b == z {
            big_d
        } else if (a < h) == (b < h) {
            1.0
        } else {
            2.0
        }
    })?;
    d.expect_cut("al_cut_k2", LinkageRule::Average, n, 2, &[concat(&[&x, &y]), vec![z]], Provenance::ClosedForm)?;
    d.expect_cut("al_cut_k3", LinkageRule::Average, n, 3, &[x.clone(), y.clone(), vec![z]], Provenance::ClosedForm)?;
    for k in 2..=n / 2 {
        // a block holding z and another point has diameter D
        d.scalars.push(scalar(
            &format!("al_isolates_z_k{k}"),
            crit(Criterion::MaxDiam, cut(LinkageRule::Average, n, k)),
            Cmp::Le,
            2.0,
            Provenance::ClosedForm,
        ));
    }
    let k = 5.min(n / 2);
    d.scalars.push(scalar(
        &format!("random_z_shared_k{k}"),
        Quantity::NonSingletonFraction { point: z, k, seeds: 200 },
        Cmp::Ge,
        0.6,
        Provenance::TheoreticalBound,
    ));
    d.finish(src, "X, Y, then z last", true)
}

/// `s_1`, `s_2` at distance `T`; `S_3`, `S_4` with `n/2 - 1` points each,
/// `eps` inside and `T` across; `s_1` and `s_2` at `2T` from everything
/// else. Average linkage's 2-cut is `(S_1∪S_2, S_3∪S_4)` with
/// `cs_ratio_av = 1/2`; `(S_1∪S_3, S_2∪S_4)` scores about `8/n`.
pub fn gen_unbounded_av(n: usize, big_t: f64, eps: f64) -> Result<InstanceBundle> {
    if n < 6 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("unbounded_av needs an even n >= 6, got {n}")));
    }
    if !(big_t > 0.0 && eps >= 0.0 && eps < big_t && big_t.is_finite()) {
        return Err(Error::InvalidArgument(format!("unbounded_av needs 0 <= eps < T, got eps = {eps}, T = {big_t}")));
    }
    let h = n / 2 - 1;
    let mut d = Draft::new("unbounded_av", &[("n", n.to_string()), ("t", big_t.to_string()), ("eps", eps.to_string())]);
    let s1 = d.group("S1", 1)[0];
    let s2 = d.group("S2", 1)[0];
    let s3 = d.group("S3", h);
    let s4 = d.group("S4", h);
    let side = |i: usize| if i < 2 + h { 3 } else { 4 };
    let src = DistanceSource::from_fn(n, |a, b| match (a, b) {
        (0, 1) => big_t,
        (0, _) | (1, _) => 2.0 * big_t,
        _ if side(a) == side(b) => eps,
        _ => big_t,
    })?;
    d.expect_cut(
        "al_cut_k4",
        LinkageRule::Average,
        n,
        4,
        &[vec![s1], vec![s2], s3.clone(), s4.clone()],
        Provenance::ClosedForm,
    )?;
    d.expect_cut(
        "al_cut_k2",
        LinkageRule::Average,
        n,
        2,
        &[vec![s1, s2], concat(&[&s3, &s4])],
        Provenance::ClosedForm,
    )?;

    let pairs = |m: usize| (m * (m - 1) / 2) as f64;
    let hf = h as f64;
    let within_34 = (2.0 * pairs(h) * eps + hf * hf * big_t) / pairs(2 * h);
    let cs_al = within_34.max(big_t) / (2.0 * big_t);
    let within_13 = (hf * 2.0 * big_t + pairs(h) * eps) / pairs(h + 1);
    let sep_rival = (big_t + 4.0 * hf * big_t + hf * hf * big_t) / ((hf + 1.0) * (hf + 1.0));
    let cs_rival = within_13 / sep_rival;
    let rival = partition("(S1+S3, S2+S4)", n, &[concat(&[&[s1], &s3]), concat(&[&[s2], &s4])])?;
    let al = cut(LinkageRule::Average, n, 2);
    d.scalars.push(scalar("cs_av_al", crit(Criterion::CsRatioAv, al.clone()), Cmp::Eq, cs_al, Provenance::ClosedForm));
    d.scalars.push(scalar(
        "cs_av_al_at_most_1",
        crit(Criterion::CsRatioAv, al.clone()),
        Cmp::Le,
        1.0,
        Provenance::TheoreticalBound,
    ));
    d.scalars.push(scalar(
        "cs_av_rival",
        crit(Criterion::CsRatioAv, rival.clone()),
        Cmp::Eq,
        cs_rival,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "cs_av_al_over_rival",
        Quantity::ratio(crit(Criterion::CsRatioAv, al), crit(Criterion::CsRatioAv, rival)),
        Cmp::Eq,
        cs_al / cs_rival,
        Provenance::ClosedForm,
    ));
    d.notes.push("the rival's max_avg is about 8T/n, so the gap grows linearly in n".into());
    d.finish(src, "s_1, s_2, S3, S4", true)
}

/// `A` (`n/2 - 1` points) and `B` (`n/2` points), distance 1 inside and 4
/// across, plus `p` at 4 from `B`, 2 from `A` except one point `a` at
/// `n/2 - 2`. Average linkage's 2-cut is `(A∪{p}, B)` with
/// `cs_ratio_dm = (n/2 - 2)/4`. The source is a metric only for `n <= 10`.
pub fn gen_nonmetric(n: usize) -> Result<InstanceBundle> {
    if n < 8 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("nonmetric needs an even n >= 8, got {n}")));
    }
    let mut d = Draft::new("nonmetric", &[("n", n.to_string())]);
    let a = d.group("A", n / 2 - 1);
    let b = d.group("B", n / 2);
    let p = d.group("p", 1)[0];
    let in_a = |i: usize| i < n / 2 - 1;
    let far = (n / 2 - 2) as f64;
    let src = DistanceSource::from_fn(n, |i, j| {
        if j == p {
            if i == 0 {
                far
            } else if in_a(i) {
                2.0
            } else {
                4.0
            }
        } else if in_a(i) == in_a(j) {
            1.0
        } else {
            4.0
        }
    })?;
    d.expect_cut(
        "al_cut_k2",
        LinkageRule::Average,
        n,
        2,
        &[concat(&[&a, &[p]]), b.clone()],
        Provenance::ClosedForm,
    )?;
    let cs_al = far.max(2.0) / 4.0;
    let al = cut(LinkageRule::Average, n, 2);
    d.scalars.push(scalar("cs_dm_al", crit(Criterion::CsRatioDm, al.clone()), Cmp::Eq, cs_al, Provenance::ClosedForm));
    let two_hn = 2.0 * harmonic(n)?;
    d.scalars.push(scalar(
        "cs_dm_al_over_2hn",
        Quantity::scaled(crit(Criterion::CsRatioDm, al), 1.0 / two_hn),
        Cmp::Eq,
        cs_al / two_hn,
        Provenance::ClosedForm,
    ));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let cs_rival = 4.0 / ((na * nb * 4.0 + far + 2.0 * (na - 1.0)) / (na * (nb + 1.0)));
    let rival = partition("(A, B+p)", n, &[a.clone(), concat(&[&b, &[p]])])?;
    d.scalars.push(scalar("cs_dm_rival", crit(Criterion::CsRatioDm, rival), Cmp::Eq, cs_rival, Provenance::ClosedForm));
    d.notes.push("cs_dm of the cut exceeds 2 H_n only from n = 86 on".into());
    d.finish(src, "A with the far point a first, then B, then p", n <= 10)
}

/// `A` (`n - 1 - sqrt(n)` points at mutual distance `eps`), `B = b_1..b_s`
/// with `dist(b_i, A) = i`, `dist(b_i, b_j) = |i - j|`, and `p` at `1 + eps`
/// from `A` and `1 + eps + i` from `b_i`. Single linkage's 2-cut isolates
/// `p`, which keeps `sep_av` below 2.
pub fn gen_sl_sep(n: usize, eps: f64) -> Result<InstanceBundle> {
    let s = (n as f64).sqrt().round() as usize;
    if s * s != n || s < 2 {
        return Err(Error::InvalidArgument(format!("sl_sep needs a perfect square n >= 4, got {n}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("sl_sep needs 0 < eps < 1, got {eps}")));
    }
    let mut d = Draft::new("sl_sep", &[("n", n.to_string()), ("eps", eps.to_string())]);
    let a = d.group("A", n - 1 - s);
    let b = d.group("B", s);
    let p = d.group("p", 1)[0];
    let na = a.len();
    // b_i has rank i = index - na + 1
    let rank = |i: usize| (i + 1 - na) as f64;
    let src = DistanceSource::from_fn(n, |i, j| {
        let (ia, ja) = (i < na, j < na);
        if j == p {
            if ia {
                1.0 + eps
            } else {
                1.0 + eps + rank(i)
            }
        } else if ia && ja {
            eps
        } else if ia {
            rank(j)
        } else {
            (rank(j) - rank(i)).abs()
        }
    })?;
    d.expect_cut("single_cut_k2", LinkageRule::Single, n, 2, &[concat(&[&a, &b]), vec![p]], Provenance::ClosedForm)?;

    let sf = s as f64;
    let sum_i = sf * (sf + 1.0) / 2.0;
    let sep_sl = (na as f64 * (1.0 + eps) + sf * (1.0 + eps) + sum_i) / (n - 1) as f64;
    let sep_rival = (na as f64 * sum_i + sf * (1.0 + eps) + sum_i) / ((na + 1) as f64 * sf);
    let sl = cut(LinkageRule::Single, n, 2);
    let rival = partition("(A+p, B)", n, &[concat(&[&a, &[p]]), b.clone()])?;
    d.scalars.push(scalar("sep_av_single", crit(Criterion::SepAv, sl.clone()), Cmp::Eq, sep_sl, Provenance::ClosedForm));
    d.scalars.push(scalar(
        "sep_av_single_bound",
        crit(Criterion::SepAv, sl.clone()),
        Cmp::Le,
        2.0,
        Provenance::TheoreticalBound,
    ));
    d.scalars.push(scalar(
        "sep_av_rival",
        crit(Criterion::SepAv, rival.clone()),
        Cmp::Eq,
        sep_rival,
        Provenance::ClosedForm,
    ));
    d.scalars.push(scalar(
        "sep_av_rival_over_single",
        Quantity::ratio(crit(Criterion::SepAv, rival), crit(Criterion::SepAv, sl)),
        Cmp::Ge,
        sf / 4.0,
        Provenance::TheoreticalBound,
    ));
    d.finish(src, "A, then b_1..b_s, then p", true)
}
