use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use flowdelta::classify::{self, Window};
use flowdelta::delta;
use flowdelta::io::{self, catalog};
use flowdelta::solver::{self, Boundary, Field, Grid, StepSettings, Workspace};
use flowdelta::{Execution, SourceTerm, State, SystemParams};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn llf_sweep(c: &mut Criterion) {
    let p = SystemParams::frozen(-1.5, 5.0).unwrap();
    let grid = Grid::centered(100_000, 0.01);
    let start = Field::riemann(&grid, State::new(3.0, -3.0), State::new(2.0, -5.0));
    let mut g = c.benchmark_group("llf_step");
    for (name, exec) in MODES {
        let settings = StepSettings { cfl: 0.45, boundary: Boundary::Outflow, exec, dt_cap: f64::INFINITY };
        g.bench_function(BenchmarkId::new(name, grid.n_cells), |b| {
            let mut field = start.clone();
            let mut ws = Workspace::default();
            b.iter(|| solver::llf_step(&p, &grid, &mut field, 0.0, settings, &mut ws).unwrap());
        });
    }
    g.finish();
}

fn region_map(c: &mut Criterion) {
    let p = SystemParams::frozen(-1.5, 5.0).unwrap();
    let mut g = c.benchmark_group("region_map");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, 120), |b| {
            b.iter(|| classify::region_map(&p, State::new(3.0, -3.0), 0.0, Window::default(), 120, exec).unwrap());
        });
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let p = SystemParams::new(-0.5, 5.0, SourceTerm::constant(0.1)).unwrap();
    let (rho, u) = Window::default().axes(40);
    let mut g = c.benchmark_group("scan_overcompressive");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, 40), |b| {
            b.iter(|| delta::scan_overcompressive(&p, State::new(3.0, -4.0), 20.0, &rho, &u, 1e-2, exec));
        });
    }
    g.finish();
}

fn catalog_batch(c: &mut Criterion) {
    let mut entries: Vec<_> = catalog::catalog().into_iter().filter(|e| e.is_panel()).take(8).collect();
    for e in &mut entries {
        e.scenario.t_end /= 10.0;
    }
    let mut g = c.benchmark_group("catalog_batch");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, entries.len()), |b| {
            b.iter(|| io::run::run_catalog(&entries, exec));
        });
    }
    g.finish();
}

criterion_group!(benches, llf_sweep, region_map, scan, catalog_batch);
criterion_main!(benches);
