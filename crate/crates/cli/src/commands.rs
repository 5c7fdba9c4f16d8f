//! Subcommand implementations. Every command writes its data files and a
//! `manifest.json` into the output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};

use rd3_bvp::io::{fmt17, write_diagram, write_orbit, Event, Manifest};
use rd3_bvp::{continue_branch, detect_hamiltonian_hopf, newton_solve, orbit_from_seed, PeriodicOrbit};
use rd3_core::asymptotic1::build_one_pulse;
use rd3_core::asymptotic2::build_two_pulse_small;
use rd3_core::asymptotic3::build_two_pulse_large;
use rd3_core::melnikov::{region_map, MelnikovParams};
use rd3_core::model::{equilibria, turing_curve};
use rd3_core::{Branch, PhasePoint};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

struct Output<'a> {
    cfg: &'a RunConfig,
    manifest: Manifest,
}

impl<'a> Output<'a> {
    fn new(cfg: &'a RunConfig, command: &str) -> Result<Self> {
        fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;
        Ok(Output { cfg, manifest: Manifest::new(command, cfg.params) })
    }

    fn file(&mut self, name: &str, fill: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.cfg.out.join(name);
        let f = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(f);
        fill(&mut w)?;
        w.flush()?;
        self.manifest.outputs.push(name.to_string());
        println!("{}", path.display());
        Ok(())
    }

    fn lines<I: IntoIterator<Item = String>>(&mut self, name: &str, header: &str, rows: I) -> Result<()> {
        self.file(name, |w| {
            writeln!(w, "{header}")?;
            for r in rows {
                writeln!(w, "{r}")?;
            }
            Ok(())
        })
    }

    fn finish(mut self) -> Result<()> {
        let path = self.cfg.out.join("manifest.json");
        let f = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.manifest.outputs.push("manifest.json".into());
        self.manifest.write(BufWriter::new(f))?;
        Ok(())
    }
}

fn row(values: &[f64]) -> String {
    values.iter().map(|&x| fmt17(x)).collect::<Vec<_>>().join(",")
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "plus",
        Branch::Minus => "minus",
    }
}

pub fn equilibria_cmd(cfg: &RunConfig) -> Result<()> {
    let mut out = Output::new(cfg, "equilibria")?;
    let rows = equilibria(&cfg.params).into_iter().map(|e| {
        let s = &e.spectrum;
        let mu: Vec<f64> = s.mu.iter().flat_map(|m| [m.re, m.im]).collect();
        format!(
            "{},{},{:?},{},{},{},{},{}",
            fmt17(e.ue),
            e.double_root,
            s.fast,
            fmt17(s.discriminant),
            s.real_pairs(),
            s.imaginary_pairs(),
            s.has_quadruple(),
            row(&mu)
        )
    });
    out.lines(
        "equilibria.csv",
        "ue,double_root,fast_type,discriminant,real_pairs,imaginary_pairs,quadruple,mu0_re,mu0_im,mu1_re,mu1_im,mu2_re,mu2_im",
        rows.collect::<Vec<_>>(),
    )?;
    out.finish()
}

pub fn turing_cmd(cfg: &RunConfig) -> Result<()> {
    let p = &cfg.params;
    let curve = turing_curve(p.eps, p.b1, p.c1, cfg.branch);
    let lo = cfg.a_lo.unwrap_or(curve - 0.1);
    let hi = cfg.a_hi.unwrap_or(curve + 0.1);
    let found = detect_hamiltonian_hopf(p, cfg.branch, lo, hi, cfg.hopf_tol)?;
    let mut out = Output::new(cfg, "turing")?;
    let line = format!("{},{},{}", row(&[p.eps, p.b1, p.c1, p.d]), branch_name(cfg.branch), row(&[curve, found]));
    out.lines("turing.csv", "eps,B1,C1,D,branch,A_curve,A_detected", [line])?;
    out.finish()
}

pub fn melnikov_map_cmd(cfg: &RunConfig) -> Result<()> {
    let p = &cfg.params;
    let (cells, curves) = region_map(p.c1, p.d, p.l, cfg.grid, cfg.newton.exec)?;
    let mut out = Output::new(cfg, "melnikov-map")?;
    let rows = cells
        .iter()
        .map(|c| format!("{},{},{},{}", row(&[c.a1, c.b1]), c.count, c.nearest.label(), fmt17(c.distance)));
    out.lines("region.csv", "A1,B1,count,nearest_boundary,distance", rows.collect::<Vec<_>>())?;

    // straight boundaries by their endpoints on the grid box, saddle-node as polylines
    let (lo, hi) = (cfg.grid.lo, cfg.grid.hi);
    let mut lines = Vec::new();
    for (name, k) in [("line_x0", -p.c1), ("line_xL", p.c1)] {
        // A1 + B1 = k
        for a in [lo, hi] {
            lines.push(format!("{name},{}", row(&[a, k - a])));
        }
    }
    if p.c1 == 0.0 {
        let dt = rd3_core::melnikov::dtilde(p.d, p.l);
        for a in [lo, hi] {
            lines.push(format!("pitchfork,{}", row(&[a, -dt * a])));
        }
    }
    for (k, poly) in curves.saddle_node.iter().enumerate() {
        for &(a, b) in poly {
            lines.push(format!("saddle_node_{k},{}", row(&[a, b])));
        }
    }
    out.lines("boundary.csv", "curve,A1,B1", lines)?;
    out.finish()
}

/// Asymptotic solution selected by `thm`, as a function of `x`.
fn asymptotic(cfg: &RunConfig) -> Result<(String, Box<dyn Fn(f64) -> PhasePoint>)> {
    let p = cfg.params;
    Ok(match cfg.thm {
        1 => {
            let s = build_one_pulse(&p, cfg.branch)?;
            let order = cfg.order;
            (format!("thm1 one-pulse {} {:?}", branch_name(cfg.branch), order), Box::new(move |x| s.eval(x, order)))
        }
        2 => {
            if p.a0 != 0.0 {
                return Err(CliError::Domain(format!("thm=2 needs A0 = 0, got {}", p.a0)));
            }
            let mel = MelnikovParams::new(p.a1, p.b1, p.c1, p.d, p.l)?;
            let s = build_two_pulse_small(&mel, p.eps, cfg.root)?;
            (format!("thm2 two-pulse small-A root {}", cfg.root), Box::new(move |x| s.eval(x)))
        }
        _ => {
            let s = build_two_pulse_large(p.a0, p.d, p.l, p.eps)?;
            ("thm3 two-pulse large-A".to_string(), Box::new(move |x| s.eval(x)))
        }
    })
}

fn write_profile(out: &mut Output, name: &str, f: &dyn Fn(f64) -> PhasePoint, l: f64, n: usize) -> Result<()> {
    let rows = (0..n).map(|k| {
        let x = -l + 2.0 * l * k as f64 / (n - 1) as f64;
        let y = f(x);
        row(&[x, y.u, y.p, y.v, y.q, y.w, y.r])
    });
    out.lines(name, rd3_bvp::io::ORBIT_HEADER, rows.collect::<Vec<_>>())
}

pub fn build_cmd(cfg: &RunConfig) -> Result<()> {
    let (label, f) = asymptotic(cfg)?;
    let mut out = Output::new(cfg, "build")?;
    out.manifest.seeds.push(label);
    write_profile(&mut out, "asymptotic.csv", &*f, cfg.params.l, cfg.samples)?;
    out.finish()
}

fn solved(cfg: &RunConfig) -> Result<(String, PeriodicOrbit)> {
    let (label, f) = asymptotic(cfg)?;
    let seed = orbit_from_seed(cfg.params, cfg.resolution, &*f);
    Ok((label, newton_solve(&seed, &cfg.newton)?.orbit))
}

pub fn solve_cmd(cfg: &RunConfig) -> Result<()> {
    let (label, orbit) = solved(cfg)?;
    let mut out = Output::new(cfg, "solve")?;
    out.manifest.seeds.push(label);
    out.file("orbit.csv", |w| Ok(write_orbit(w, &orbit)?))?;
    out.finish()
}

fn write_events(out: &mut Output, events: &[Event]) -> Result<()> {
    let rows = events.iter().map(|e| format!("{},{},{},{}", e.branch_id, e.kind, e.step, row(&[e.a, e.mass])));
    out.lines("events.csv", "branch_id,kind,step,A,mass", rows.collect::<Vec<_>>())
}

pub fn continue_cmd(cfg: &RunConfig) -> Result<()> {
    let (label, start) = solved(cfg)?;
    let run = continue_branch(&start, cfg.direction, &cfg.step, 0)?;
    let mut out = Output::new(cfg, "continue")?;
    out.manifest.seeds.push(label);
    out.manifest.events = Event::from_run(&run);
    out.file("diagram.csv", |w| Ok(write_diagram(w, &run.rows)?))?;
    let events = out.manifest.events.clone();
    write_events(&mut out, &events)?;
    out.file("start.csv", |w| Ok(write_orbit(w, &start)?))?;
    out.finish()
}
