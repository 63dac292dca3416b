use psc::channel::{loglog_slope, run_bench, scaling_table, ScalingRow};

fn rows(k: usize) -> Vec<ScalingRow> {
    let deltas: Vec<usize> = (2..=8).collect();
    scaling_table(&[k], &deltas, 16, 0.05, 3).unwrap()
}

#[test]
fn classic_cost_is_linear_in_n_per_branch() {
    for k in [1, 2] {
        let rows = rows(k);
        let n: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let per_branch: Vec<f64> = rows
            .iter()
            .map(|r| r.classic_additions / (1u64 << (r.k + r.delta)) as f64)
            .collect();
        let slope = loglog_slope(&n, &per_branch);
        assert!((slope - 1.0).abs() <= 0.15, "k={k} slope {slope}");
    }
}

#[test]
fn improved_cost_tracks_n_log_n() {
    for k in [1, 2] {
        let rows = rows(k);
        let nlogn: Vec<f64> = rows
            .iter()
            .map(|r| r.n as f64 * (r.n as f64).log2())
            .collect();
        let cost: Vec<f64> = rows.iter().map(|r| r.improved_additions).collect();
        let slope = loglog_slope(&nlogn, &cost);
        assert!((slope - 1.0).abs() <= 0.15, "k={k} slope {slope}");
    }
}

#[test]
fn steady_cost_does_not_depend_on_the_noise() {
    for p in [0.0, 0.1, 0.4] {
        let r = scaling_table(&[2], &[3], 12, p, 1).unwrap();
        assert_eq!(r[0].classic_additions, 32.0 * 25.0);
        assert_eq!(r[0].improved_additions, rows(2)[1].improved_additions);
    }
}

#[test]
fn long_bench_decoders_agree() {
    let report = run_bench(1, 2, 100, 200, 0.05, 17).unwrap();
    assert_eq!(report.disagreements, 0);
    let [classic, improved] = &report.decoders[..] else {
        panic!("two decoders expected");
    };
    assert_eq!(classic.bler, improved.bler);
    assert_eq!(classic.ber, improved.ber);
    assert!(improved.additions < classic.additions);
    assert_eq!(classic.comparisons, improved.comparisons);
    assert_eq!(
        report.without_timing(),
        run_bench(1, 2, 100, 200, 0.05, 17)
            .unwrap()
            .without_timing()
    );
}
