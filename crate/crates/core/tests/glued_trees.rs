use qwalk_core::analysis::{glued_trees_walk, mapped_line_walk, EndCoin, MappedCoin, MappedLineSpec};
use qwalk_core::coins::CoinSpec;
use qwalk_core::ctwalk::{adjacency_hamiltonian, ct_exit_series, glued_line_hamiltonian};
use qwalk_core::graphs::{build_glued_trees, GluedTreesSpec, Labeling};
use qwalk_core::walk::{prepare, run, CoinField, InitialCoinState, Observer};

const OBS: [Observer; 2] = [Observer::Exit, Observer::Entropy];

fn compare(coin: MappedCoin, end: &EndCoin, b: usize, n: usize, labeling: Labeling, entropy: bool) {
    let steps = 8 * n + 12;
    let line = mapped_line_walk(&MappedLineSpec::from_coin(b, n, coin, end).unwrap(), steps, false).unwrap();
    let full = glued_trees_walk(GluedTreesSpec::new(b, n, 17, labeling), coin, end, steps, &OBS).unwrap();
    for (t, (x, y)) in full.exits().iter().zip(line.exits()).enumerate() {
        assert!((x - y).abs() < 1e-8, "{coin:?} B={b} N={n} t={t}: exit {x} vs {y}");
    }
    if entropy {
        for (t, (x, y)) in full.entropies().iter().zip(line.entropies()).enumerate() {
            assert!((x - y).abs() < 1e-8, "{coin:?} B={b} N={n} t={t}: entropy {x} vs {y}");
        }
    }
}

#[test]
fn grover_walk_reduces_to_the_column_line() {
    for b in [2, 3] {
        for n in 1..=4 {
            compare(MappedCoin::Grover, &EndCoin::grover(b), b, n, Labeling::RegularRootZero, true);
            compare(MappedCoin::Grover, &EndCoin::grover(b), b, n, Labeling::RandomConsistent, false);
        }
    }
    let sym = EndCoin {
        inner: CoinSpec::Symmetric2D,
        phase: 0.4,
    };
    for n in 1..=4 {
        compare(MappedCoin::Grover, &sym, 2, n, Labeling::RegularRootZero, true);
    }
}

#[test]
fn dft_walk_reduces_under_root_zero_labels() {
    for b in [2, 3] {
        for n in 1..=4 {
            compare(MappedCoin::Dft, &EndCoin::grover(b), b, n, Labeling::RegularRootZero, true);
        }
    }
}

#[test]
fn continuous_walk_reduces_to_the_column_chain() {
    for b in [2, 3] {
        for n in 1..=4 {
            let g = build_glued_trees(GluedTreesSpec::new(b, n, 3, Labeling::RandomConsistent)).unwrap();
            let full = adjacency_hamiltonian(&g, 1.0 / (b as f64).sqrt());
            let chain = glued_line_hamiltonian(b, n).unwrap();
            let times: Vec<f64> = (0..50).map(|k| 0.3 * k as f64).collect();
            let p = ct_exit_series(&full, g.entrance().unwrap(), g.exit().unwrap(), &times).unwrap();
            let q = ct_exit_series(&chain, 0, 2 * n + 1, &times).unwrap();
            for (x, y) in p.iter().zip(&q) {
                assert!((x - y).abs() < 1e-8, "B={b} N={n}");
            }
        }
    }
}

#[test]
fn exit_series_ignores_the_glue() {
    let end = EndCoin::grover(2);
    let series: Vec<Vec<f64>> = [1, 2, 3, 4, 5]
        .iter()
        .map(|&seed| {
            let spec = GluedTreesSpec::new(2, 4, seed, Labeling::RandomConsistent);
            glued_trees_walk(spec, MappedCoin::Grover, &end, 60, &[Observer::Exit]).unwrap().exits()
        })
        .collect();
    for s in &series[1..] {
        for (x, y) in s.iter().zip(&series[0]) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn off_entrance_start_reaches_the_exit_less() {
    let (b, n) = (2, 5);
    let g = build_glued_trees(GluedTreesSpec::new(b, n, 8, Labeling::RandomConsistent)).unwrap();
    let end = EndCoin::grover(b).padded_spec();
    let field = CoinField::from_spec(&g, &MappedCoin::Grover.full_spec(b), Some(&end)).unwrap();
    let steps = 4 * n + 4;
    let peak = |start: usize| {
        let state = prepare(&g, start, &InitialCoinState::UniformOverPorts).unwrap();
        run(state, &field, steps, &[Observer::Exit], start)
            .unwrap()
            .exits()
            .into_iter()
            .fold(0.0, f64::max)
    };
    let symmetric = peak(g.entrance().unwrap());
    let child = g.neighbors(g.entrance().unwrap()).next().unwrap();
    let off = peak(child);
    assert!(off < symmetric, "{off} vs {symmetric}");
}
