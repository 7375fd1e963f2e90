//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Pass criterion numbers as arguments to run a subset.

use std::alloc::{GlobalAlloc, Layout, System};
use std::fmt::Write as _;
use std::hint::black_box;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use arcmatch::arctree::ArcTree;
use arcmatch::engine::{naps, naps_observed, rooted_text, EngineConfig, Mode, Observer};
use arcmatch::gen::Generator;
use arcmatch::oracle::{embed_exists, gamma_def, gamma_rec};
use arcmatch::succinct::{access, decode, encode, BitVector, CompressedGamma, RankSelect};
use arcmatch::{ArcAnnotatedString, GammaRead, GammaSeq, Interval};
use rand::Rng;

struct Tracking;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Tracking {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOC: Tracking = Tracking;

/// Peak heap bytes allocated while `f` runs, above what was live before it.
fn heap_peak<T>(f: impl FnOnce() -> T) -> (T, usize) {
    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let out = f();
    (out, PEAK.load(Ordering::Relaxed) - base)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Checks every sequence the engine compresses.
#[derive(Default)]
struct Envelope {
    checked: AtomicUsize,
    violations: AtomicUsize,
    first: Mutex<Option<String>>,
}

impl Envelope {
    fn check(&self, source: &GammaSeq, packed: &CompressedGamma) {
        let m = source.pattern_len();
        let mut problems = Vec::new();
        if packed.v().len() != packed.u().len() || packed.len() > 2 * m + 1 {
            problems.push(format!("|V| = {} for m = {m}", packed.len()));
        }
        if packed.v().count_ones() > m + 1 {
            problems.push(format!("V has {} ones", packed.v().count_ones()));
        }
        if packed.u().count_ones() != m {
            problems.push(format!("U has {} ones", packed.u().count_ones()));
        }
        if decode(packed).as_ref() != Ok(source) {
            problems.push("decode does not invert encode".into());
        }
        self.checked.fetch_add(1, Ordering::Relaxed);
        if !problems.is_empty() {
            self.violations.fetch_add(1, Ordering::Relaxed);
            self.first
                .lock()
                .unwrap()
                .get_or_insert_with(|| format!("{:?}: {}", source.values(), problems.join(", ")));
        }
    }
}

struct Watch<'a>(&'a Envelope);

impl Observer for Watch<'_> {
    fn encoded(&mut self, source: &GammaSeq, packed: &CompressedGamma) {
        self.0.check(source, packed);
    }
}

/// Root results of all three modes, or a description of how they differ.
fn all_modes(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    env: &Envelope,
) -> Result<(bool, usize), String> {
    let mut results = Vec::new();
    for mode in Mode::ALL {
        let r = naps_observed(p, q, EngineConfig::new(mode), &mut Watch(env))
            .map_err(|e| format!("{mode}: {e}"))?;
        results.push((mode, r));
    }
    let (_, first) = &results[0];
    for (mode, r) in &results[1..] {
        if r.root != first.root || r.is_subsequence != first.is_subsequence {
            return Err(format!(
                "{mode} gives {:?}, uncompressed gives {:?}",
                r.root.values(),
                first.root.values()
            ));
        }
    }
    Ok((first.is_subsequence, first.gamma_root))
}

fn describe(p: &ArcAnnotatedString, q: &ArcAnnotatedString) -> String {
    format!(
        "P={} {} Q={} {}",
        p.sequence(),
        p.structure(),
        q.sequence(),
        q.structure()
    )
}

/// All nested arc sets on positions `lo..=hi`.
fn arc_sets(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    if lo > hi {
        return vec![vec![]];
    }
    let mut out = arc_sets(lo + 1, hi);
    for r in lo + 1..=hi {
        for inside in arc_sets(lo + 1, r - 1) {
            for rest in arc_sets(r + 1, hi) {
                let mut arcs = vec![(lo, r)];
                arcs.extend(&inside);
                arcs.extend(&rest);
                out.push(arcs);
            }
        }
    }
    out
}

fn all_strings(max_len: usize, alphabet: &[char]) -> Vec<ArcAnnotatedString> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        let sets = arc_sets(1, len);
        let words = alphabet.len().pow(len as u32);
        for w in 0..words {
            let mut x = w;
            let bases: String = (0..len)
                .map(|_| {
                    let c = alphabet[x % alphabet.len()];
                    x /= alphabet.len();
                    c
                })
                .collect();
            for arcs in &sets {
                out.push(ArcAnnotatedString::validate(&bases, arcs).unwrap());
            }
        }
    }
    out
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get())
}

fn exhaustive(env: &Envelope) -> Outcome {
    let ps = all_strings(4, &['A', 'U']);
    let qs = all_strings(6, &['A', 'U']);
    let next = AtomicUsize::new(0);
    let divergences = AtomicUsize::new(0);
    let positives = AtomicUsize::new(0);
    let first: Mutex<Option<String>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..threads() {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(p) = ps.get(i) else { break };
                for q in &qs {
                    let verdict = all_modes(p, q, env).and_then(|(decision, root)| {
                        let found = embed_exists(p.as_view(), q.as_view())
                            .map_err(|e| e.to_string())?
                            .is_some();
                        let def =
                            gamma_def(p, q, 1, p.len(), 1, q.len()).map_err(|e| e.to_string())?;
                        if found != decision || def != root {
                            return Err(format!(
                                "engine ({decision}, {root}), search {found}, definition {def}"
                            ));
                        }
                        Ok(decision)
                    });
                    match verdict {
                        Ok(yes) => {
                            positives.fetch_add(usize::from(yes), Ordering::Relaxed);
                        }
                        Err(e) => {
                            divergences.fetch_add(1, Ordering::Relaxed);
                            first
                                .lock()
                                .unwrap()
                                .get_or_insert_with(|| format!("{}: {e}", describe(p, q)));
                        }
                    }
                }
            });
        }
    });
    let d = divergences.into_inner();
    let mut detail = format!(
        "{} patterns x {} texts = {} pairs, {} embeddable, {d} divergences",
        ps.len(),
        qs.len(),
        ps.len() * qs.len(),
        positives.into_inner()
    );
    if let Some(f) = first.into_inner().unwrap() {
        let _ = write!(detail, "; first: {f}");
    }
    Outcome::new(d == 0, detail)
}

fn randomized(env: &Envelope) -> Outcome {
    // the recurrence oracle recurses deeply on texts of a few hundred bases
    let run = || {
        let mut gen = Generator::new(20_240_601);
        let mut first = None;
        let (mut divergences, mut positives) = (0, 0);
        for _ in 0..1000 {
            let (p, q) = gen.instance(50, 200);
            let verdict = all_modes(&p, &q, env).and_then(|(decision, root)| {
                let rec = gamma_rec(&p, &q, 1, p.len(), 1, q.len());
                if rec != root {
                    return Err(format!("engine {root}, recurrence {rec}"));
                }
                Ok(decision)
            });
            match verdict {
                Ok(yes) => positives += usize::from(yes),
                Err(e) => {
                    divergences += 1;
                    first.get_or_insert_with(|| format!("{}: {e}", describe(&p, &q)));
                }
            }
        }
        let mut detail =
            format!("1000 instances, {positives} embeddable, {divergences} divergences");
        if let Some(f) = first {
            let _ = write!(detail, "; first: {f}");
        }
        Outcome::new(divergences == 0, detail)
    };
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(1 << 30)
            .spawn_scoped(scope, run)
            .unwrap()
            .join()
            .unwrap()
    })
}

fn figure_instance() -> Outcome {
    let q = ArcAnnotatedString::parse_dotbracket("CAGGAUCUGCG", "(.(.(.))())").unwrap();
    let p = ArcAnnotatedString::parse_dotbracket("CAAUCUGCG", "(.(.).())").unwrap();
    let expected_arcs_p = vec![(1, 9), (3, 5), (7, 8)];
    let expected_arcs_q = vec![(1, 11), (3, 8), (5, 7), (9, 10)];
    let arcs_ok = p.arcs().collect::<Vec<_>>() == expected_arcs_p
        && q.arcs().collect::<Vec<_>>() == expected_arcs_q;
    let results: Vec<_> = Mode::ALL
        .iter()
        .map(|&mode| naps(&p, &q, EngineConfig::new(mode)).unwrap())
        .collect();
    let decided = results
        .iter()
        .all(|r| r.is_subsequence && r.gamma_root == 9);
    let tree = ArcTree::build(&q).unwrap();
    let spaces: Vec<usize> = tree.spaces(tree.root()).positions().collect();
    Outcome::new(
        arcs_ok && decided && tree.arc(tree.root()) == (1, 11) && spaces == [1, 2, 11],
        format!(
            "decision {}, gamma_root {}, spaces of (1, 11) = {spaces:?}",
            results[0].is_subsequence, results[0].gamma_root
        ),
    )
}

fn envelope(env: &Envelope) -> Outcome {
    let checked = env.checked.load(Ordering::Relaxed);
    let violations = env.violations.load(Ordering::Relaxed);
    let mut detail =
        format!("{checked} encoded sequences from criteria 1 and 2, {violations} violations");
    if let Some(f) = env.first.lock().unwrap().as_ref() {
        let _ = write!(detail, "; first: {f}");
    }
    Outcome::new(checked > 0 && violations == 0, detail)
}

/// A random sequence with `j - 1 <= v[j] <= v[j + 1] <= m`, biased towards
/// long runs so that both piece kinds occur.
fn monotone(rng: &mut impl Rng, m: usize) -> GammaSeq {
    let mut values = vec![0u32; m];
    let mut next = m;
    for j in (1..=m).rev() {
        let v = match rng.gen_range(0..3) {
            0 => next,
            1 => j - 1,
            _ => rng.gen_range(j - 1..=next),
        };
        values[j - 1] = v as u32;
        next = v;
    }
    GammaSeq::new(Interval::new(1, 1), values).unwrap()
}

fn access_formula() -> Outcome {
    let mut gen = Generator::new(5);
    let rng = gen.rng();
    let (mut violations, mut queries) = (0usize, 0usize);
    for _ in 0..10_000 {
        let m = rng.gen_range(0..=256);
        let g = monotone(rng, m);
        let c = encode(&g).unwrap();
        for k in 1..=m {
            queries += 1;
            if access(&c, k) != Ok(g.values()[k - 1] as usize) {
                violations += 1;
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!("10000 sequences, {queries} accesses, {violations} violations"),
    )
}

/// The pattern/text pairs used for the structural bounds.
fn large_instances() -> Vec<(ArcAnnotatedString, ArcAnnotatedString)> {
    let mut gen = Generator::new(77);
    let mut out = Vec::new();
    // complete binary arc trees push the light depth to its maximum
    for k in 10..=16u32 {
        let mut structure = String::new();
        fn tree(k: u32, out: &mut String) {
            if k == 0 {
                return;
            }
            out.push('(');
            tree(k - 1, out);
            tree(k - 1, out);
            out.push(')');
        }
        tree(k, &mut structure);
        let bases: String = gen.bases(structure.len()).into_iter().collect();
        let q = ArcAnnotatedString::parse_dotbracket(&bases, &structure).unwrap();
        let p = gen.subsequence(&q, 12);
        out.push((p, q));
    }
    while out.len() < 100 {
        let rng = gen.rng();
        let pairs = 10f64.powf(rng.gen_range(3.0..5.0)) as usize;
        let n = 2 * pairs + rng.gen_range(0..=pairs);
        let m = rng.gen_range(4..=16);
        let q = gen.string_with_arcs(n, pairs);
        let p = if out.len() % 2 == 0 {
            gen.subsequence(&q, m)
        } else {
            gen.string(m, 0.5)
        };
        out.push((p, q));
    }
    out
}

fn log2_floor(x: usize) -> usize {
    x.ilog2() as usize
}

fn space_structure(instances: &[(ArcAnnotatedString, ArcAnnotatedString)]) -> Outcome {
    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    let mut arc_range = (usize::MAX, 0);
    for (idx, (p, q)) in instances.iter().enumerate() {
        let arcs = rooted_text(q).arc_count();
        arc_range = (arc_range.0.min(arcs), arc_range.1.max(arcs));
        let bound = 3 * (log2_floor(arcs) + 2);
        for mode in Mode::ALL {
            let r = naps(p, q, EngineConfig::new(mode)).unwrap();
            let live = r.stats.peak_live_gamma;
            worst = worst.max(live as f64 / bound as f64);
            if live > bound || !(1_000..=100_000).contains(&arcs) {
                violations.push(format!(
                    "#{idx} {mode}: {live} live, bound {bound}, {arcs} arcs"
                ));
            }
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!(
            "{} instances x 3 modes, |A_Q| in [{}, {}], worst peak/bound = {worst:.2}, {} violations{}",
            instances.len(),
            arc_range.0,
            arc_range.1,
            violations.len(),
            violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    )
}

fn operation_counts(instances: &[(ArcAnnotatedString, ArcAnnotatedString)]) -> Outcome {
    let mut violations = Vec::new();
    let mut worst_extend = 0.0f64;
    for (idx, (p, q)) in instances.iter().enumerate() {
        let text = rooted_text(q);
        let (arcs, n) = (text.arc_count(), text.len());
        let s = naps(p, q, EngineConfig::default()).unwrap().stats;
        let cap = 2 * n + 4 * arcs;
        worst_extend = worst_extend.max(s.extend as f64 / cap as f64);
        if s.initialize as usize != 2 * arcs || s.meld as usize != arcs || s.extend as usize > cap {
            violations.push(format!(
                "#{idx}: initialize {} meld {} extend {} for |A_Q| = {arcs}, n = {n}",
                s.initialize, s.meld, s.extend
            ));
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!(
            "{} instances, worst extend / (2n + 4|A_Q|) = {worst_extend:.3}, {} violations{}",
            instances.len(),
            violations.len(),
            violations
                .first()
                .map(|v| format!("; first: {v}"))
                .unwrap_or_default()
        ),
    )
}

fn median_time(p: &ArcAnnotatedString, q: &ArcAnnotatedString, repeats: usize) -> Duration {
    let mut times: Vec<Duration> = (0..repeats)
        .map(|_| {
            let start = Instant::now();
            black_box(naps(black_box(p), black_box(q), EngineConfig::default()).unwrap());
            start.elapsed()
        })
        .collect();
    times.sort();
    times[repeats / 2]
}

fn time_scaling() -> Outcome {
    let mut gen = Generator::new(8);
    let q1 = gen.string(100_000, 0.6);
    let q2 = gen.string(200_000, 0.6);
    let p1 = gen.string(100, 0.6);
    let p2 = gen.string(200, 0.6);
    // warm up allocator and caches
    median_time(&p1, &q1, 1);
    let (a, b) = (median_time(&p1, &q1, 5), median_time(&p1, &q2, 5));
    let (c, d) = (median_time(&p1, &q1, 5), median_time(&p2, &q1, 5));
    let n_ratio = b.as_secs_f64() / a.as_secs_f64();
    let m_ratio = d.as_secs_f64() / c.as_secs_f64();
    let ok = |r: f64| (1.5..=3.0).contains(&r);
    Outcome::new(
        ok(n_ratio) && ok(m_ratio),
        format!(
            "m=100: n 1e5 {a:.2?} -> 2e5 {b:.2?} (x{n_ratio:.2}); n=1e5: m 100 {c:.2?} -> 200 {d:.2?} (x{m_ratio:.2})"
        ),
    )
}

fn memory_scaling() -> Outcome {
    let mut gen = Generator::new(9);
    let p = gen.string(200, 0.6);
    let small = gen.string(100_000, 0.6);
    let large = gen.string(1_000_000, 0.6);
    let cfg = EngineConfig::new(Mode::CompressRandomAccess);
    let (r_small, heap_small) = heap_peak(|| naps(&p, &small, cfg).unwrap());
    let (r_large, heap_large) = heap_peak(|| naps(&p, &large, cfg).unwrap());
    let arcs = rooted_text(&large).arc_count();
    let bound = 4.0 * 200.0 * ((arcs as f64).log2() + 2.0);
    let bits = r_large.stats.peak_gamma_bits;
    let ratio = heap_large as f64 / heap_small as f64;
    let _ = r_small;
    Outcome::new(
        (bits as f64) <= bound && ratio <= 12.0,
        format!(
            "peak Γ bits {bits} vs 4m(log2|A_Q|+2) = {bound:.0} (|A_Q| = {arcs}, {} held, light depth {}); heap peak {:.1} MiB at n=1e5, {:.1} MiB at n=1e6 (x{ratio:.2})",
            r_large.stats.peak_live_gamma,
            r_large.stats.max_lightdepth,
            heap_small as f64 / (1 << 20) as f64,
            heap_large as f64 / (1 << 20) as f64,
        ),
    )
}

fn rank_select() -> Outcome {
    let mut gen = Generator::new(10);
    let rng = gen.rng();
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    let mut per_query = Vec::new();
    for (len, queries) in [
        (10_000usize, 20_000usize),
        (100_000, 30_000),
        (1_000_000, 50_000),
    ] {
        let density = rng.gen_range(0.05..0.95);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
        let bv = BitVector::from_bits(bits.iter().copied());
        // reference answers by a single scan
        let mut prefix = Vec::with_capacity(len + 1);
        let mut positions = Vec::new();
        prefix.push(0usize);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                positions.push(i + 1);
            }
            prefix.push(positions.len());
        }
        for _ in 0..queries / 2 {
            let k = rng.gen_range(0..=len);
            mismatches += usize::from(bv.rank(k) != Ok(prefix[k]));
            if !positions.is_empty() {
                let t = rng.gen_range(1..=positions.len());
                mismatches += usize::from(bv.select(t) != Ok(positions[t - 1]));
            }
            checked += 2;
        }
        if len != 100_000 {
            let ks: Vec<usize> = (0..1 << 20).map(|_| rng.gen_range(0..=len)).collect();
            let ts: Vec<usize> = (0..1 << 20)
                .map(|_| rng.gen_range(1..=positions.len()))
                .collect();
            let start = Instant::now();
            let mut acc = 0usize;
            for (&k, &t) in ks.iter().zip(&ts) {
                acc = acc.wrapping_add(bv.rank(black_box(k)).unwrap());
                acc = acc.wrapping_add(bv.select(black_box(t)).unwrap());
            }
            black_box(acc);
            per_query.push(start.elapsed().as_secs_f64() / (2 * ks.len()) as f64);
        }
    }
    let ratio = per_query[1] / per_query[0];
    Outcome::new(
        mismatches == 0 && ratio <= 2.0,
        format!(
            "{checked} queries, {mismatches} mismatches; mean query {:.1} ns at L=1e4, {:.1} ns at L=1e6 (x{ratio:.2})",
            per_query[0] * 1e9,
            per_query[1] * 1e9
        ),
    )
}

fn main() {
    let wanted: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let run = |n: u32| wanted.is_empty() || wanted.contains(&n);
    let env = Envelope::default();
    let mut failed = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        if !run(n) {
            return;
        }
        let start = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {n:>2} {name} [{:.1?}]: {}",
            start.elapsed(),
            o.detail
        );
        failed += usize::from(!o.pass);
    };
    report(1, "exhaustive oracle equivalence", &mut || exhaustive(&env));
    report(2, "randomized equivalence", &mut || randomized(&env));
    report(3, "embedding example", &mut figure_instance);
    if run(4) && !(run(1) || run(2)) {
        println!("SKIP  4 compression envelope: needs criterion 1 or 2");
    } else {
        report(4, "compression envelope", &mut || envelope(&env));
    }
    report(5, "access formula", &mut access_formula);
    let instances = if run(6) || run(7) {
        large_instances()
    } else {
        Vec::new()
    };
    report(6, "space structure", &mut || space_structure(&instances));
    report(7, "operation counts", &mut || operation_counts(&instances));
    report(8, "time scaling", &mut time_scaling);
    report(9, "memory scaling", &mut memory_scaling);
    report(10, "rank/select", &mut rank_select);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
