use std::fmt::Write as _;
use std::path::Path;

use aperiodic::cut_project::{generate, ProjectionScheme, SchemeDescriptor, SchemeKind, TorusParameter};
use aperiodic::diffraction::model_set_spectrum;
use aperiodic::equivalence::{derive as apply_rule, extract_atlas, li_equivalent, ltm_estimate, DerivationRule, Structure};
use aperiodic::pattern::{fmt_num, Pattern, Region};
use aperiodic::random_tiling::{
    block_entropy, count_by_orientation, enumerate_configs, mc_sample, sample_binary_chain, torus_ladder,
    BinaryEnsemble, DartRhombusConfig, Family, MoveSet, SeedPattern, ENUMERATION_BUDGET,
};
use aperiodic::substitution::{
    build_atlas_by_inflation, complexity as factor_count, word_to_chain, GeometricInflation, InflationRule,
    SymbolicSubstitution, TilingConfig, View,
};
use serde_json::json;

use crate::io::{invalid, Failure, Outputs};
use crate::{
    AtlasArgs, CompareArgs, ComplexityArgs, CountArgs, DeriveArgs, DiffractArgs, Ensemble, InflateArgs, LtmArgs,
    Moves, PatternArgs, SampleArgs, ScanArgs, SeedTile, Start, ViewArg,
};

type Job = Result<(), Failure>;

fn parse_f64(s: &str, what: &str) -> Result<f64, Failure> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| invalid(format!("bad {what} '{s}'")))
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let (a, b) = s.split_once(':').ok_or_else(|| invalid(format!("expected lo:hi, got '{s}'")))?;
    let (lo, hi) = (parse_f64(a, "bound")?, parse_f64(b, "bound")?);
    if lo >= hi {
        return Err(invalid(format!("empty range '{s}'")));
    }
    Ok((lo, hi))
}

pub fn parse_region(s: &str) -> Result<Region, Failure> {
    if let Some(r) = s.strip_prefix("ball:") {
        let r = parse_f64(r, "radius")?;
        return if r > 0.0 { Ok(Region::ball(r)) } else { Err(invalid("radius must be positive")) };
    }
    if let Some(h) = s.strip_prefix("square:") {
        let h = parse_f64(h, "half-width")?;
        return if h > 0.0 { Ok(Region::square(h)) } else { Err(invalid("half-width must be positive")) };
    }
    match s.split_once(',') {
        None => parse_range(s).map(|(lo, hi)| Region::interval(lo, hi)),
        Some((x, y)) => {
            let (x, y) = (parse_range(x)?, parse_range(y)?);
            Ok(Region::Box { lo: [x.0, y.0], hi: [x.1, y.1] })
        }
    }
}

/// A scheme, offset and region, fully validated.
struct Source {
    scheme: ProjectionScheme,
    gamma: TorusParameter,
    region: Region,
}

fn default_gamma(n: usize) -> &'static str {
    match n {
        2 => "0.2137,0",
        4 => "0.1,0.2,0.3,0.05",
        5 => "0.1,0.2,-0.15,0.05,-0.2",
        _ => "",
    }
}

fn source(a: &PatternArgs) -> Result<Source, Failure> {
    let scheme = match &a.descriptor {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            let desc: SchemeDescriptor =
                serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            ProjectionScheme::from_descriptor(&desc)?
        }
        None => ProjectionScheme::by_kind(SchemeKind::parse(&a.scheme)?),
    };
    let n = scheme.dimension();
    let gamma = match &a.gamma {
        Some(g) => TorusParameter::parse(g)?,
        None if !default_gamma(n).is_empty() => TorusParameter::parse(default_gamma(n))?,
        None => TorusParameter::Float(vec![0.0; n]),
    };
    if gamma.len() != n {
        return Err(invalid(format!("offset needs {n} entries, got {}", gamma.len())));
    }
    let region = match &a.region {
        Some(r) => parse_region(r)?,
        None if scheme.physical_dimension() == 1 => Region::interval(0.0, 100.0),
        None => Region::ball(20.0),
    };
    if region.dim() != scheme.physical_dimension() {
        return Err(invalid("region dimension does not match the scheme"));
    }
    Ok(Source { scheme, gamma, region })
}

fn points_svg(p: &Pattern) -> String {
    let pos = p.positions();
    let d = p.dim();
    let (lo, hi) = p.region().bounds();
    let span = if d == 1 { hi[0] - lo[0] } else { (hi[0] - lo[0]).max(hi[1] - lo[1]) };
    let s = 800.0 / span.max(1e-9);
    let h = if d == 1 { 40.0 } else { (hi[1] - lo[1]) * s + 20.0 };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
        (hi[0] - lo[0]) * s + 20.0,
        h
    );
    for q in pos {
        let y = if d == 1 { 20.0 } else { (hi[1] - q[1]) * s + 10.0 };
        let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"2\"/>", fmt_num((q[0] - lo[0]) * s + 10.0), fmt_num(y));
    }
    out.push_str("</svg>\n");
    out
}

pub fn gen(a: &PatternArgs, dir: &Path) -> Job {
    let src = source(a)?;
    let p = generate(&src.scheme, &src.gamma, &src.region)?;
    let mut out = Outputs::new(dir)?;
    out.write("points.csv", &p.to_csv())?;
    out.write("points.svg", &points_svg(&p))?;
    println!("{} points", p.len());
    out.manifest(
        "gen",
        a,
        None,
        json!({
            "points": p.len(),
            "density": p.density(),
            "model_density": src.scheme.density(),
            "descriptor": src.scheme.descriptor(),
        }),
    )
}

pub fn diffract(a: &DiffractArgs, dir: &Path) -> Job {
    if !(a.floor > 0.0 && a.floor < 1.0) {
        return Err(invalid("floor must lie in (0, 1)"));
    }
    if !(a.kmax > 0.0) {
        return Err(invalid("kmax must be positive"));
    }
    let src = source(&a.pattern)?;
    let spec = model_set_spectrum(&src.scheme, &src.gamma, a.kmax, a.floor)?;
    let central = spec.entries.iter().find(|e| e.k_norm() < 1e-12).map(|e| e.intensity);
    let dim = src.scheme.physical_dimension();
    let mut out = Outputs::new(dir)?;
    out.write("spectrum.csv", &spec.to_csv(dim))?;
    out.write("spectrum.svg", &spec.to_svg(a.floor, a.kmax))?;
    println!("{} peaks", spec.len());
    let d = src.scheme.density();
    out.manifest(
        "diffract",
        a,
        None,
        json!({ "peaks": spec.len(), "central_intensity": central, "density_squared": d * d }),
    )
}

fn seed_tiling(g: GeometricInflation, seed: SeedTile) -> TilingConfig {
    match seed {
        SeedTile::Wheel => g.seed_wheel(),
        SeedTile::Acute => g.proto_tile(0, false),
        SeedTile::Obtuse => g.proto_tile(1, false),
    }
}

pub fn inflate(a: &InflateArgs, dir: &Path) -> Job {
    if a.iterations > 40 {
        return Err(invalid("at most 40 iterations"));
    }
    let mut out = Outputs::new(dir)?;
    match InflationRule::by_name(&a.rule)? {
        InflationRule::Fibonacci => {
            if a.iterations > 30 {
                return Err(invalid("the fibonacci word is capped at 30 iterations"));
            }
            let s = SymbolicSubstitution::fibonacci();
            let word = s.substitute(b"a", a.iterations)?;
            out.write("word.txt", &(String::from_utf8_lossy(&word).into_owned() + "\n"))?;
            out.write("chain.csv", &word_to_chain(&word)?.to_csv())?;
            let c = s.counts(&word)?;
            println!("a={} b={}", c[0], c[1]);
            out.manifest("inflate", a, None, json!({ "length": word.len(), "counts": [c[0] as u64, c[1] as u64] }))
        }
        InflationRule::Geometric(g) => {
            if a.iterations > 14 {
                return Err(invalid("geometric inflation is capped at 14 iterations"));
            }
            let cfg = g.inflate(&seed_tiling(g, a.seed_tile), a.iterations)?;
            out.write("tiles.csv", &cfg.to_records())?;
            out.write("tiles.svg", &cfg.to_svg())?;
            let n = cfg.counts();
            println!("{} tiles", cfg.len());
            out.manifest(
                "inflate",
                a,
                None,
                json!({ "tiles": cfg.len(), "counts": n, "geometry_verified": g.geometry_verified() }),
            )
        }
    }
}

fn view(v: ViewArg) -> View {
    match v {
        ViewArg::Tiles => View::Tiles,
        ViewArg::Rhombs => View::Rhombs,
        ViewArg::Vertices => View::Vertices,
    }
}

fn check_radius(r: f64) -> Result<(), Failure> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(invalid("radius must be positive"))
    }
}

pub fn atlas(a: &AtlasArgs, dir: &Path) -> Job {
    check_radius(a.radius)?;
    let (atlas, summary) = match &a.rule {
        Some(rule) => {
            if a.iterations > 12 {
                return Err(invalid("atlas depth is capped at 12"));
            }
            let b = build_atlas_by_inflation(InflationRule::by_name(rule)?, view(a.view), a.radius, a.iterations)?;
            let s = json!({ "patches": b.atlas.len(), "depth": b.depth, "stabilized": b.stabilized });
            (b.atlas, s)
        }
        None => {
            let src = source(&a.pattern)?;
            let p = generate(&src.scheme, &src.gamma, &src.region)?;
            let at = extract_atlas(&p, a.radius, None)?;
            let s = json!({ "patches": at.len(), "samples": at.samples });
            (at, s)
        }
    };
    let mut out = Outputs::new(dir)?;
    out.write("atlas.txt", &atlas.to_records())?;
    println!("{} patches", atlas.len());
    out.manifest("atlas", a, None, summary)
}

/// Repeated `ab` (gaps τ, 1) over the same span as `like`.
fn periodic_chain(like: &Region) -> Result<Pattern, Failure> {
    let (lo, hi) = like.bounds();
    let reps = ((hi[0] - lo[0]) / (1.0 + aperiodic::TAU)).ceil() as usize + 1;
    let word = b"ab".repeat(reps);
    let chain = word_to_chain(&word)?;
    Ok(chain.restrict(Region::interval(0.0, hi[0] - lo[0])))
}

pub fn compare_li(a: &CompareArgs, dir: &Path) -> Job {
    check_radius(a.radius)?;
    let src = source(&a.pattern)?;
    let pa = generate(&src.scheme, &src.gamma, &src.region)?;
    let pb = if a.periodic_b {
        if src.scheme.kind() != SchemeKind::Fibonacci || a.pattern.descriptor.is_some() {
            return Err(invalid("--periodic-b needs the fibonacci scheme"));
        }
        periodic_chain(&src.region)?
    } else {
        let g = match &a.gamma_b {
            Some(g) => TorusParameter::parse(g)?,
            None => return Err(invalid("give --gamma-b or --periodic-b")),
        };
        if g.len() != src.scheme.dimension() {
            return Err(invalid("second offset has the wrong length"));
        }
        generate(&src.scheme, &g, &src.region)?
    };
    let eq = li_equivalent(&pa, &pb, a.radius)?;
    println!("{}", if eq { "equivalent" } else { "not equivalent" });
    let mut out = Outputs::new(dir)?;
    out.write("result.txt", &format!("li_equivalent={eq}\n"))?;
    out.manifest("compare-li", a, None, json!({ "li_equivalent": eq, "points_a": pa.len(), "points_b": pb.len() }))
}

pub fn derive(a: &DeriveArgs, dir: &Path) -> Job {
    let rule = DerivationRule::by_name(&a.rule)?;
    if a.iterations > 10 {
        return Err(invalid("derive is capped at 10 inflations"));
    }
    let g = GeometricInflation::PenroseRobinson;
    let robinson = g.inflate(&g.seed_wheel(), a.iterations)?;
    let input = match rule {
        DerivationRule::PenroseToRobinson => apply_rule(DerivationRule::RobinsonToPenrose, &Structure::Tiling(robinson))?,
        _ => Structure::Tiling(robinson),
    };
    let result = apply_rule(rule, &input)?;
    let mut out = Outputs::new(dir)?;
    let n = match &result {
        Structure::Tiling(t) => {
            out.write("tiles.csv", &t.to_records())?;
            out.write("tiles.svg", &t.to_svg())?;
            t.len()
        }
        Structure::Points(p) => {
            out.write("points.csv", &p.to_csv())?;
            p.len()
        }
    };
    println!("{n} output items");
    out.manifest("derive", a, None, json!({ "rule": rule.name(), "items": n }))
}

pub fn ltm(a: &LtmArgs, dir: &Path) -> Job {
    check_radius(a.radius)?;
    let src = source(&a.pattern)?;
    let p = generate(&src.scheme, &src.gamma, &src.region)?;
    let est = ltm_estimate(&p, a.radius, None)?;
    let mut csv = String::new();
    for row in &est.basis {
        let _ = writeln!(csv, "{}", row.iter().map(i64::to_string).collect::<Vec<_>>().join(","));
    }
    let mut out = Outputs::new(dir)?;
    out.write("basis.csv", &csv)?;
    println!("rank {}", est.rank);
    out.manifest(
        "ltm",
        a,
        None,
        json!({ "rank": est.rank, "generators": est.generators, "degenerate": est.degenerate, "basis": est.basis }),
    )
}

pub fn complexity(a: &ComplexityArgs, dir: &Path) -> Job {
    if a.rule != "fibonacci" {
        return Err(invalid(format!("complexity is defined for symbolic rules; '{}' is not one", a.rule)));
    }
    if a.nmax == 0 || a.nmax > 4096 {
        return Err(invalid("nmax must be in 1..=4096"));
    }
    let len = a.length.unwrap_or((64 * a.nmax).max(4096));
    if len < 2 * a.nmax {
        return Err(invalid("prefix must be at least twice nmax"));
    }
    let word = SymbolicSubstitution::fibonacci().fixed_point(b'a', len)?;
    let mut csv = String::from("n,count,stable,log_count_over_n\n");
    let mut all_stable = true;
    for n in 1..=a.nmax {
        let c = factor_count(&word, n);
        all_stable &= c.stable;
        let _ = writeln!(csv, "{},{},{},{}", n, c.count, c.stable, fmt_num((c.count as f64).ln() / n as f64));
    }
    let mut out = Outputs::new(dir)?;
    out.write("complexity.csv", &csv)?;
    print!("{csv}");
    out.manifest("complexity", a, None, json!({ "prefix_length": len, "all_stable": all_stable }))
}

pub fn sample(a: &SampleArgs, seed: u64, dir: &Path) -> Job {
    let mut out = Outputs::new(dir)?;
    match a.ensemble {
        Ensemble::Binary => {
            let e = BinaryEnsemble::new(a.nu, a.n, seed)?;
            if a.block == 0 || a.block > a.n {
                return Err(invalid("block length must be in 1..=n"));
            }
            let word = sample_binary_chain(&e);
            let s = block_entropy(&word, a.block)?;
            out.write("chain.txt", &(String::from_utf8_lossy(&word).into_owned() + "\n"))?;
            println!("block entropy {}", fmt_num(s));
            out.manifest("sample", a, Some(seed), json!({ "block_entropy": s }))
        }
        Ensemble::DartRhombus => {
            let start = match a.start {
                Start::Rhombi => SeedPattern::AllRhombi,
                Start::Darts => SeedPattern::Darts,
            };
            let moves = match a.moves {
                Moves::Local => MoveSet::Local,
                Moves::Winding => MoveSet::LocalAndWinding,
            };
            let init = DartRhombusConfig::seed(a.l1, a.l2, start)?;
            let cfg = mc_sample(&init, a.steps, moves, seed)?;
            out.write("tiles.csv", &cfg.to_records())?;
            out.write("tiles.svg", &cfg.to_svg())?;
            let n = cfg.rhombus_counts();
            println!("rhombi {:?} darts {}", n, cfg.dart_count());
            out.manifest("sample", a, Some(seed), json!({ "rhombi": n, "darts": cfg.dart_count() }))
        }
    }
}

fn parse_triple(s: &str) -> Result<[usize; 3], Failure> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| invalid(format!("bad count '{x}'"))))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| invalid("expected three comma-separated counts"))
}

pub fn count(a: &CountArgs, dir: &Path) -> Job {
    let mut out = Outputs::new(dir)?;
    if a.ladder {
        let ladder = torus_ladder(ENUMERATION_BUDGET)?;
        let mut csv = String::from("l1,l2,triangles,tiles,count,per_tile,per_small_triangle\n");
        for r in &ladder {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                r.l1,
                r.l2,
                r.triangles,
                r.tiles,
                r.count,
                fmt_num(r.per_tile),
                fmt_num(r.per_small_triangle)
            );
        }
        out.write("ladder.csv", &csv)?;
        print!("{csv}");
        return out.manifest("count", a, None, json!({ "rungs": ladder.len() }));
    }
    let (l1, l2) = match (a.l1, a.l2) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(invalid("give --l1 and --l2, or --ladder")),
    };
    let constraint = a.rhombi.as_deref().map(parse_triple).transpose()?;
    let n = enumerate_configs(l1, l2, constraint)?;
    let mut csv = String::from("l1,l2,count\n");
    let _ = writeln!(csv, "{l1},{l2},{n}");
    if constraint.is_none() && l1 * l2 > 0 {
        csv.push_str("\nn0,n1,n2,count\n");
        for (k, c) in count_by_orientation(l1, l2)? {
            let _ = writeln!(csv, "{},{},{},{c}", k[0], k[1], k[2]);
        }
    }
    out.write("count.csv", &csv)?;
    println!("{n}");
    out.manifest("count", a, None, json!({ "count": n.to_string() }))
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid(format!("expected lo:hi:points, got '{s}'")));
    }
    let (lo, hi) = (parse_f64(parts[0], "bound")?, parse_f64(parts[1], "bound")?);
    let n: usize = parts[2].parse().map_err(|_| invalid("bad point count"))?;
    if n < 2 || lo >= hi {
        return Err(invalid("grid needs lo < hi and at least 2 points"));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

pub fn entropy_scan(a: &ScanArgs, dir: &Path) -> Job {
    if let Some(r) = a.fit_radius {
        check_radius(r)?;
    }
    let family = match a.ensemble {
        Ensemble::Binary => Family::Binary(parse_grid(&a.grid)?),
        Ensemble::DartRhombus => Family::DartRhombus { l: a.l },
    };
    let scan = aperiodic::random_tiling::entropy_scan(&family, a.fit_radius)?;
    let mut out = Outputs::new(dir)?;
    out.write("scan.csv", &scan.to_records())?;
    let m = scan.max();
    println!("max {} at {:?}", fmt_num(m.entropy), m.params);
    out.manifest(
        "entropy-scan",
        a,
        None,
        json!({
            "argmax": m.params,
            "max_entropy": m.entropy,
            "fit_r2": scan.fit.as_ref().map(|f| f.r2),
            "fit_radius": scan.fit.as_ref().map(|f| f.radius),
        }),
    )
}
