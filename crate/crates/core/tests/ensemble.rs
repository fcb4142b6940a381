use gmqaoa::harness::{aggregate_critical, run_cell, run_sweep, Method};
use gmqaoa::hubo::generate;
use gmqaoa::rng::instance_seed;
use gmqaoa::{enumerate_spectrum, optimize_layerwise, ExperimentConfig, Mixer, OptBudget, Problem};

#[test]
fn deeper_grover_circuits_help_on_average() {
    let budget = OptBudget::default();
    let (mut shallow, mut deep) = (0.0, 0.0);
    for i in 0..20 {
        let inst = generate(Problem::Sk, 6, 2, instance_seed(3, i), 1.0).unwrap();
        let spec = enumerate_spectrum(&inst, None).unwrap();
        let trace = optimize_layerwise(&spec, Mixer::Grover, 30, &budget).unwrap();
        shallow += trace.p_success[4];
        deep += trace.p_success[29];
    }
    assert!(deep > shallow, "{deep} vs {shallow}");
}

#[test]
fn layerwise_curves_never_decrease() {
    let mut config = ExperimentConfig::new(Problem::MaxCutHypergraph, vec![5], vec![3]);
    config.instances = 8;
    config.max_depth = 12;
    config.methods = vec![Method::Xm, Method::Gm];
    let cell = run_cell(&config, 5, 3).unwrap();
    for m in [Method::Xm, Method::Gm] {
        for row in &cell.method(m).unwrap().per_instance {
            assert!(row.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{m}: {row:?}");
        }
    }
}

#[test]
fn aggregates_are_recomputable_from_points() {
    let res = run_sweep(r#"{"problem":"SK","n_list":[5],"d_list":[2,3],"instances":4,"max_depth":5,"seed":9}"#).unwrap();
    let points = res.points_csv();
    let mut lines = points.lines();
    assert_eq!(lines.next(), Some("problem,D,n,instance,method,depth,p_success"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 4 * 4 * 5);
    for cell in &res.cells {
        for curves in &cell.curves {
            for k in 0..5 {
                let vals: Vec<f64> = rows
                    .iter()
                    .filter(|r| {
                        r[1] == cell.d.to_string() && r[4] == curves.method.name() && r[5] == (k + 1).to_string()
                    })
                    .map(|r| r[6].parse().unwrap())
                    .collect();
                assert_eq!(vals.len(), 4);
                let mean = vals.iter().sum::<f64>() / 4.0;
                assert!((mean - curves.mean[k]).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn critical_table_orders_rows() {
    let res = run_sweep(r#"{"problem":"SK","n_list":[5,4],"d_list":[3,2],"instances":3,"max_depth":6,"methods":["XM","GM"]}"#)
        .unwrap();
    let rows = aggregate_critical(&res.cells, Method::Gm).unwrap();
    let keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.d, r.n)).collect();
    assert_eq!(keys, vec![(2, 4), (2, 5), (3, 4), (3, 5)]);
    for r in rows {
        assert_eq!(r.stats.total, 3);
    }
}
