use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use qwalk_core::analysis::{
    bipartite_fidelity, bipartite_fourier_block, entanglement_landscape, fourier_block_cos_theta,
    initial_state_sweep, mapped_line_walk, sweep_branching, sweep_depth, transmission_probability, EndCoin,
    MappedCoin, MappedLineSpec, PeakSweep, PhaseSet, WalkKind,
};
use qwalk_core::coins::CoinSpec;
use qwalk_core::ctwalk::{adjacency_hamiltonian, glued_line_hamiltonian, CtSpec, GluedLineExit};
use qwalk_core::graphs::{build_glued_trees, parse_glued_spec, parse_graph, GluedTreesSpec, LatticeKind, LatticeShift, PortGraph};
use qwalk_core::numerics::{norm_sqr, unitary_eigenvalues, ComplexMatrix, Propagator, C64, I, NORM_TOL, ONE, ZERO};
use qwalk_core::observables::{detect_period, ObservableSeries};
use qwalk_core::walk::{prepare, run, CoinField, InitialCoinState, Observer};
use qwalk_core::Error;

use crate::config::{
    parse_range, AnalyzeCommand, BranchingArgs, Cli, Command, Common, CtWalkArgs, DepthArgs, FileConfig,
    FourierArgs, LandscapeArgs, PeriodArgs, PhasesArgs, SweepCommand, TransmissionArgs, WalkArgs,
};
use crate::output::{float, header, Csv, Meta};
use crate::CliError;

type Outcome = Result<(), CliError>;

pub fn execute(cli: Cli) -> Outcome {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let common = Common::resolve(&cli, &file);
    let workers = common.workers;
    let job = move || -> Outcome {
        match cli.command {
            Command::Walk(a) => walk(a.over(file.walk), &common),
            Command::CtWalk(a) => ct_walk(a.over(file.ct_walk), &common),
            Command::Sweep(SweepCommand::Depth(a)) => depth(a.over(file.sweep.depth), &common),
            Command::Sweep(SweepCommand::Branching(a)) => branching(a.over(file.sweep.branching), &common),
            Command::Sweep(SweepCommand::Phases(a)) => phases(a.over(file.sweep.phases), &common),
            Command::Sweep(SweepCommand::Landscape(a)) => landscape(a.over(file.sweep.landscape), &common),
            Command::Analyze(AnalyzeCommand::BipartitePeriod(a)) => {
                bipartite_period(a.over(file.analyze.bipartite_period), &common)
            }
            Command::Analyze(AnalyzeCommand::FourierBlocks(a)) => {
                fourier_blocks(a.over(file.analyze.fourier_blocks), &common)
            }
            Command::Analyze(AnalyzeCommand::Transmission(a)) => {
                transmission(a.over(file.analyze.transmission), &common)
            }
        }
    };
    match workers {
        Some(0) => Err(CliError::Config("workers: must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("workers: {e}")))?
            .install(job),
        None => job(),
    }
}

fn required<T>(value: Option<T>, command: &str, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("{command}: --{flag} is required")))
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn parse_observers(s: &str, allowed: &[Observer]) -> Result<Vec<Observer>, CliError> {
    let mut out: Vec<Observer> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let o: Observer = part.parse()?;
        if !allowed.contains(&o) {
            return Err(CliError::Config(format!("obs: '{o}' is not available here")));
        }
        if !out.contains(&o) {
            out.push(o);
        }
    }
    Ok(out)
}

/// Root coin from a name; `sigmax` needs `B = 2`.
fn parse_end(s: &str, b: usize) -> Result<CoinSpec, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "sigmax" if b == 2 => Ok(CoinSpec::Bias { rho: 0.0 }),
        "sigmax" => Err(CliError::Config(format!("end: sigmax needs B=2, got B={b}"))),
        "grover" => Ok(CoinSpec::Grover { d: b }),
        _ => Ok(s.parse()?),
    }
}

fn end_coin(name: &str, phase: f64, b: usize) -> Result<EndCoin, CliError> {
    Ok(EndCoin {
        inner: parse_end(name, b)?,
        phase,
    })
}

fn mapped_coin(s: &str) -> Result<MappedCoin, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "grover" => Ok(MappedCoin::Grover),
        "dft" => Ok(MappedCoin::Dft),
        other => Err(CliError::Config(format!("coin: mapped walks take grover or dft, not '{other}'"))),
    }
}

/// `gluedtrees:` specs honour a `--seed` override.
fn build_graph(s: &str, seed: Option<u64>) -> Result<(PortGraph, Option<GluedTreesSpec>), CliError> {
    match s.trim().strip_prefix("gluedtrees:") {
        Some(args) => {
            let mut spec = parse_glued_spec(args)?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            Ok((build_glued_trees(spec)?, Some(spec)))
        }
        None => Ok((parse_graph(s)?, None)),
    }
}

fn obs_list(obs: &[Observer]) -> String {
    obs.iter().map(Observer::to_string).collect::<Vec<_>>().join(";")
}

fn write_series(
    common: &Common,
    stem: &str,
    meta: &Meta,
    series: &ObservableSeries,
    obs: &[Observer],
    dist_prefix: &str,
) -> Result<Vec<PathBuf>, CliError> {
    let scalars: Vec<Observer> = obs.iter().copied().filter(|o| *o != Observer::Distribution).collect();
    let mut head = vec!["t".to_string()];
    head.extend(scalars.iter().map(Observer::to_string));
    let mut main = Csv::create(&common.out_dir, stem, meta, &head)?;
    for r in series.records() {
        let mut row = vec![r.t.to_string()];
        for o in &scalars {
            let v = match o {
                Observer::Entropy => r.entropy,
                Observer::Spread => r.spread,
                Observer::Exit => r.exit,
                Observer::Fidelity => r.fidelity,
                Observer::Distribution => None,
            };
            row.push(float(v.expect("recorded observable")));
        }
        main.row(&row)?;
    }
    let mut paths = vec![main.finish()?];
    if obs.contains(&Observer::Distribution) {
        let width = series.records().first().and_then(|r| r.distribution.as_ref()).map_or(0, Vec::len);
        let mut dist = Csv::create(&common.out_dir, &format!("{stem}_dist"), meta, &header(&["t"], dist_prefix, width))?;
        for r in series.records() {
            let mut row = vec![r.t.to_string()];
            row.extend(r.distribution.as_ref().expect("distribution").iter().map(|&p| float(p)));
            dist.row(&row)?;
        }
        paths.push(dist.finish()?);
    }
    Ok(paths)
}

fn walk(a: WalkArgs, common: &Common) -> Outcome {
    let graph_s = required(a.graph, "walk", "graph")?;
    let steps = required(a.steps, "walk", "steps")?;
    let stem = common.stem("walk");
    let mut meta = Meta::new("walk");
    meta.set("graph", &graph_s);

    if let Some(args) = graph_s.trim().strip_prefix("mapped:") {
        let g = parse_glued_spec(args)?;
        let coin_s = required(a.coin, "walk", "coin")?;
        let end_s = a.end.unwrap_or_else(|| "grover".into());
        let phase = a.end_phase.unwrap_or(0.0);
        let obs = parse_observers(
            a.obs.as_deref().unwrap_or("exit,entropy"),
            &[Observer::Distribution, Observer::Entropy, Observer::Exit],
        )?;
        let end = end_coin(&end_s, phase, g.branching)?;
        let spec = MappedLineSpec::from_coin(g.branching, g.depth, mapped_coin(&coin_s)?, &end)?;
        let series = mapped_line_walk(&spec, steps, obs.contains(&Observer::Distribution))?;
        meta.set("coin", coin_s)
            .set("end", end_s)
            .set("end-phase", phase)
            .set("steps", steps)
            .set("obs", obs_list(&obs));
        report(&write_series(common, stem, &meta, &series, &obs, "col_")?);
        return Ok(());
    }

    let (graph, glued) = build_graph(&graph_s, a.seed)?;
    let coin_s = required(a.coin, "walk", "coin")?;
    let coin: CoinSpec = coin_s.parse()?;
    let end = match (&glued, &a.end) {
        (Some(g), end) => {
            let name = end.clone().unwrap_or_else(|| "grover".into());
            let phase = a.end_phase.unwrap_or(0.0);
            meta.set("end", &name).set("end-phase", phase);
            Some(end_coin(&name, phase, g.branching)?.padded_spec())
        }
        (None, Some(e)) => {
            if a.end_phase.is_some() {
                return Err(CliError::Config("end-phase: only glued trees have root coins".into()));
            }
            meta.set("end", e);
            Some(e.parse()?)
        }
        (None, None) => None,
    };
    if let Some(g) = glued {
        meta.set("seed", g.seed);
    }
    let init_s = a
        .init
        .unwrap_or_else(|| if graph.coin_dim() == 2 { "sym" } else { "uniform" }.into());
    let init: InitialCoinState = init_s.parse()?;
    let start = a
        .start
        .or_else(|| graph.entrance())
        .or_else(|| graph.center())
        .unwrap_or(0);
    let obs = parse_observers(
        a.obs.as_deref().unwrap_or("entropy"),
        &[
            Observer::Distribution,
            Observer::Entropy,
            Observer::Spread,
            Observer::Exit,
            Observer::Fidelity,
        ],
    )?;
    let field = CoinField::from_spec(&graph, &coin, end.as_ref())?;
    let state = prepare(&graph, start, &init)?;
    let series = run(state, &field, steps, &obs, start)?;
    meta.set("coin", coin_s)
        .set("init", init_s)
        .set("start", start)
        .set("steps", steps)
        .set("obs", obs_list(&obs));
    report(&write_series(common, stem, &meta, &series, &obs, "site_")?);
    Ok(())
}

fn ct_walk(a: CtWalkArgs, common: &Common) -> Outcome {
    let graph_s = required(a.graph, "ct-walk", "graph")?;
    let steps = a.steps.unwrap_or(100);
    let dt = a.dt.unwrap_or(0.1);
    if !(dt > 0.0) {
        return Err(CliError::Config(format!("dt: {dt} must be positive")));
    }
    let obs = parse_observers(a.obs.as_deref().unwrap_or("exit"), &[Observer::Distribution, Observer::Exit])?;
    let stem = common.stem("ct_walk");
    let mut meta = Meta::new("ct-walk");
    meta.set("graph", &graph_s);

    let (spec, start, target, prefix): (CtSpec, usize, Option<usize>, &str) =
        match graph_s.trim().strip_prefix("mapped:") {
            Some(args) => {
                let g = parse_glued_spec(args)?;
                let exit = 2 * g.depth + 1;
                let start = a.start.unwrap_or(0);
                let target = a.target.unwrap_or(exit);
                if obs == [Observer::Exit] && start == 0 && target == exit {
                    let exits = GluedLineExit::new(g.branching, g.depth)?.exit_series(0.0, dt, steps + 1);
                    meta.set("start", start).set("target", target);
                    return write_ct(common, stem, meta, steps, dt, &obs, exits.into_iter().map(Some), None, "col_");
                }
                (glued_line_hamiltonian(g.branching, g.depth)?, start, Some(target), "col_")
            }
            None => {
                let (graph, glued) = build_graph(&graph_s, a.seed)?;
                if let Some(g) = glued {
                    meta.set("seed", g.seed);
                }
                let gamma = a.gamma.unwrap_or(1.0);
                meta.set("gamma", gamma);
                let start = a.start.or_else(|| graph.entrance()).or_else(|| graph.center()).unwrap_or(0);
                (adjacency_hamiltonian(&graph, gamma), start, a.target.or_else(|| graph.exit()), "site_")
            }
        };
    let n = spec.dim();
    if start >= n || target.is_some_and(|t| t >= n) {
        return Err(CliError::Config(format!("start/target: vertices are 0..{n}")));
    }
    if obs.contains(&Observer::Exit) && target.is_none() {
        return Err(CliError::Config("target: the graph has no exit vertex; pass --target".into()));
    }
    meta.set("start", start);
    if let Some(t) = target {
        meta.set("target", t);
    }
    let prop = Propagator::new(&spec.h)?;
    let mut psi0 = vec![ZERO; n];
    psi0[start] = ONE;
    let coeffs = prop.decompose(&psi0)?;
    let mut exits = Vec::with_capacity(steps + 1);
    let mut dists = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let psi = prop.evolve_decomposed(&coeffs, t);
        let norm = norm_sqr(&psi);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant(format!("norm drifted to {norm} at t={t}")).into());
        }
        exits.push(target.map(|x| psi[x].norm_sqr()));
        if obs.contains(&Observer::Distribution) {
            dists.push(psi.iter().map(|z| z.norm_sqr()).collect::<Vec<f64>>());
        }
    }
    let dists = obs.contains(&Observer::Distribution).then_some(dists);
    write_ct(common, stem, meta, steps, dt, &obs, exits.into_iter(), dists, prefix)
}

#[allow(clippy::too_many_arguments)]
fn write_ct(
    common: &Common,
    stem: &str,
    mut meta: Meta,
    steps: usize,
    dt: f64,
    obs: &[Observer],
    exits: impl Iterator<Item = Option<f64>>,
    dists: Option<Vec<Vec<f64>>>,
    prefix: &str,
) -> Outcome {
    meta.set("steps", steps).set("dt", dt).set("obs", obs_list(obs));
    let want_exit = obs.contains(&Observer::Exit);
    let head: Vec<String> = if want_exit { vec!["t".into(), "exit".into()] } else { vec!["t".into()] };
    let mut main = Csv::create(&common.out_dir, stem, &meta, &head)?;
    for (k, e) in exits.enumerate() {
        let mut row = vec![float(k as f64 * dt)];
        if want_exit {
            row.push(float(e.expect("exit probability")));
        }
        main.row(&row)?;
    }
    let mut paths = vec![main.finish()?];
    if let Some(dists) = dists {
        let width = dists.first().map_or(0, Vec::len);
        let mut dist = Csv::create(&common.out_dir, &format!("{stem}_dist"), &meta, &header(&["t"], prefix, width))?;
        for (k, p) in dists.iter().enumerate() {
            let mut row = vec![float(k as f64 * dt)];
            row.extend(p.iter().map(|&x| float(x)));
            dist.row(&row)?;
        }
        paths.push(dist.finish()?);
    }
    report(&paths);
    Ok(())
}

fn write_peaks(common: &Common, stem: &str, meta: &Meta, param: &str, sweep: &PeakSweep) -> Outcome {
    let head: Vec<String> = [param, "t_peak", "probability"].iter().map(|s| s.to_string()).collect();
    let mut peaks = Csv::create(&common.out_dir, stem, meta, &head)?;
    for (p, peak) in &sweep.peaks {
        peaks.row(&[p.to_string(), float(peak.t), float(peak.probability)])?;
    }
    let f = &sweep.fit;
    let head: Vec<String> = ["exponent", "prefactor", "residual", "used", "points"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut fit = Csv::create(&common.out_dir, &format!("{stem}_fit"), meta, &head)?;
    fit.row(&[
        float(f.exponent),
        float(f.prefactor),
        float(f.residual),
        f.used.to_string(),
        f.points.len().to_string(),
    ])?;
    report(&[peaks.finish()?, fit.finish()?]);
    println!("exponent={:.4} prefactor={:.4} residual={:.2e}", f.exponent, f.prefactor, f.residual);
    Ok(())
}

fn depth(a: DepthArgs, common: &Common) -> Outcome {
    let coin_s = required(a.coin, "sweep depth", "coin")?;
    let kind: WalkKind = coin_s.parse()?;
    let b = a.b.unwrap_or(2);
    let n_s = required(a.n, "sweep depth", "N")?;
    let depths = parse_range("N", &n_s)?;
    let end_s = a.end.unwrap_or_else(|| "grover".into());
    let phase = a.end_phase.unwrap_or(0.0);
    let end = end_coin(&end_s, phase, b)?;
    let sweep = sweep_depth(kind, b, &depths, &end)?;
    let mut meta = Meta::new("sweep-depth");
    meta.set("coin", kind)
        .set("B", b)
        .set("N", n_s)
        .set("end", end_s)
        .set("end-phase", phase);
    write_peaks(common, common.stem("depth"), &meta, "N", &sweep)
}

fn branching(a: BranchingArgs, common: &Common) -> Outcome {
    let coin_s = required(a.coin, "sweep branching", "coin")?;
    let kind: WalkKind = coin_s.parse()?;
    let n = required(a.n, "sweep branching", "N")?;
    let b_s = required(a.b, "sweep branching", "B")?;
    let bs = parse_range("B", &b_s)?;
    let end_s = a.end.unwrap_or_else(|| "grover".into());
    let phase = a.end_phase.unwrap_or(0.0);
    let ends = bs
        .iter()
        .map(|&b| end_coin(&end_s, phase, b).map(|e| (b, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let sweep = sweep_branching(kind, n, &bs, |b| {
        ends.iter().find(|(x, _)| *x == b).expect("end coin per B").1.clone()
    })?;
    let mut meta = Meta::new("sweep-branching");
    meta.set("coin", kind)
        .set("N", n)
        .set("B", b_s)
        .set("end", end_s)
        .set("end-phase", phase);
    write_peaks(common, common.stem("branching"), &meta, "B", &sweep)
}

fn lattice_coin(s: &str, d: usize) -> Result<CoinSpec, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "grover" => Ok(CoinSpec::Grover { d }),
        "dft" => Ok(CoinSpec::Dft { d }),
        _ => Ok(s.parse()?),
    }
}

fn phases(a: PhasesArgs, common: &Common) -> Outcome {
    let kind: LatticeKind = required(a.lattice, "sweep phases", "lattice")?.parse()?;
    let d = kind.degree();
    let coin_s = a.coin.unwrap_or_else(|| "grover".into());
    let coin = lattice_coin(&coin_s, d)?;
    let set: PhaseSet = a.set.as_deref().unwrap_or("free").parse()?;
    let steps = a.t.unwrap_or(15);
    let shift: LatticeShift = a.shift.as_deref().unwrap_or("flip").parse()?;
    let sweep = initial_state_sweep(kind, shift, &coin, set, steps)?;
    let vectors = set.enumerate(d)?;

    let mut meta = Meta::new("sweep-phases");
    meta.set("lattice", kind)
        .set("coin", &coin)
        .set("set", set)
        .set("t", steps)
        .set("shift", shift);
    let stem = common.stem("phases");
    let mut head = header(&["index"], "k_", d);
    head.push("spread".into());
    let mut values = Csv::create(&common.out_dir, stem, &meta, &head)?;
    for (i, (k, v)) in vectors.iter().zip(&sweep.values).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(k.iter().map(u32::to_string));
        row.push(float(*v));
        values.row(&row)?;
    }
    let argmin = sweep.argmin.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    let head: Vec<String> = ["count", "mean", "min", "argmin"].iter().map(|s| s.to_string()).collect();
    let mut summary = Csv::create(&common.out_dir, &format!("{stem}_summary"), &meta, &head)?;
    summary.row(&[sweep.count.to_string(), float(sweep.mean), float(sweep.min), argmin.clone()])?;
    report(&[values.finish()?, summary.finish()?]);
    println!("count={} mean={:.6} min={:.6} argmin=[{argmin}]", sweep.count, sweep.mean, sweep.min);
    Ok(())
}

fn landscape(a: LandscapeArgs, common: &Common) -> Outcome {
    let coin_s = a.coin.unwrap_or_else(|| "hadamard".into());
    let coin: CoinSpec = coin_s.parse()?;
    let steps = a.steps.unwrap_or(200);
    let window = a.window.unwrap_or(50);
    let alphas = linspace(0.0, FRAC_PI_2, a.alpha_points.unwrap_or(33));
    let betas = linspace(0.0, PI, a.beta_points.unwrap_or(33));
    if alphas.is_empty() || betas.is_empty() {
        return Err(CliError::Config("alpha-points/beta-points: need at least one point".into()));
    }
    let grid = entanglement_landscape(&coin, steps, window, &alphas, &betas)?;
    let mut meta = Meta::new("sweep-landscape");
    meta.set("coin", &coin)
        .set("steps", steps)
        .set("window", window)
        .set("alpha-points", alphas.len())
        .set("beta-points", betas.len());
    let head: Vec<String> = ["alpha", "beta", "amplitude"].iter().map(|s| s.to_string()).collect();
    let mut csv = Csv::create(&common.out_dir, common.stem("landscape"), &meta, &head)?;
    for (alpha, row) in alphas.iter().zip(&grid) {
        for (beta, amp) in betas.iter().zip(row) {
            csv.row(&[float(*alpha), float(*beta), float(*amp)])?;
        }
    }
    report(&[csv.finish()?]);
    let best = (0..alphas.len())
        .min_by(|&i, &j| grid[i][0].total_cmp(&grid[j][0]))
        .expect("non-empty grid");
    println!("beta={:.4}: minimum amplitude at alpha={:.4}", betas[0], alphas[best]);
    Ok(())
}

fn bipartite_period(a: PeriodArgs, common: &Common) -> Outcome {
    let d = required(a.d, "analyze bipartite-period", "d")?;
    let coin_s = a.coin.unwrap_or_else(|| "grover".into());
    let coin = lattice_coin(&coin_s, d)?;
    let init_s = a.init.unwrap_or_else(|| "uniform".into());
    let init: InitialCoinState = init_s.parse()?;
    let max = a.max.unwrap_or(200);
    let tol = a.tol.unwrap_or(1e-6);
    let fidelity = bipartite_fidelity(d, &coin, &init, max)?;
    let period = detect_period(&fidelity, tol);

    let mut meta = Meta::new("analyze-bipartite-period");
    meta.set("d", d)
        .set("coin", &coin)
        .set("init", init_s)
        .set("max", max)
        .set("tol", tol);
    let head: Vec<String> = vec!["t".into(), "fidelity".into()];
    let mut csv = Csv::create(&common.out_dir, common.stem("bipartite_period"), &meta, &head)?;
    for (t, f) in fidelity.iter().enumerate() {
        csv.row(&[t.to_string(), float(*f)])?;
    }
    report(&[csv.finish()?]);
    match period {
        Some(p) => println!("period={p}"),
        None => println!("period=none (searched 1..={max})"),
    }
    Ok(())
}

fn fourth_root_distance(z: C64) -> f64 {
    [ONE, -ONE, I, -I].iter().map(|r| (z - r).norm()).fold(f64::INFINITY, f64::min)
}

fn fourier_blocks(a: FourierArgs, common: &Common) -> Outcome {
    let d = required(a.d, "analyze fourier-blocks", "d")?;
    let mut meta = Meta::new("analyze-fourier-blocks");
    meta.set("d", d);
    let head: Vec<String> = ["k", "cos_theta", "u4_deviation", "eigen_deviation"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut csv = Csv::create(&common.out_dir, common.stem("fourier_blocks"), &meta, &head)?;
    let (mut worst_u4, mut worst_eig) = (0.0f64, 0.0f64);
    for k in 1..=2 * d as i64 {
        let u = bipartite_fourier_block(d, k)?;
        let u4 = u.pow(4)?.max_abs_diff(&ComplexMatrix::identity(u.rows()));
        let eig = unitary_eigenvalues(&u)?
            .into_iter()
            .map(fourth_root_distance)
            .fold(0.0, f64::max);
        worst_u4 = worst_u4.max(u4);
        worst_eig = worst_eig.max(eig);
        csv.row(&[k.to_string(), float(fourier_block_cos_theta(d, k)), float(u4), float(eig)])?;
    }
    report(&[csv.finish()?]);
    println!("max |U_k^4 - 1| = {worst_u4:.2e}, max eigenvalue distance from {{±1, ±i}} = {worst_eig:.2e}");
    Ok(())
}

fn transmission(a: TransmissionArgs, common: &Common) -> Outcome {
    let b = required(a.b, "analyze transmission", "B")?;
    let points = a.points.unwrap_or(179);
    let mut meta = Meta::new("analyze-transmission");
    meta.set("B", b).set("points", points);
    let head: Vec<String> = vec!["kappa".into(), "probability".into()];
    let mut csv = Csv::create(&common.out_dir, common.stem("transmission"), &meta, &head)?;
    for j in 1..=points {
        let kappa = PI * j as f64 / (points + 1) as f64;
        csv.row(&[float(kappa), float(transmission_probability(b, kappa)?)])?;
    }
    report(&[csv.finish()?]);
    println!(
        "|T(pi/2)|^2 = {:.16} (4B/(B+1)^2 = {:.16})",
        transmission_probability(b, FRAC_PI_2)?,
        4.0 * b / ((b + 1.0) * (b + 1.0))
    );
    Ok(())
}
