//! Γ sweeps and figure pipelines.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::format::num;
use crate::svg::{LinePlot, Series};
use crate::{
    propagate, weak_damping_p3, BasisKind, Error, ModelKind, PulseConfig, Result, Sequence,
    SimOptions, Trajectory,
};

/// Environment variable bounding the sweep worker count.
pub const WORKERS_ENV: &str = "STIRAP_WORKERS";

/// Worker count from `STIRAP_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Write `path` through a sibling temporary file, renamed into place on
/// success and removed on failure.
pub fn write_atomically<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let result = (|| -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(&tmp)?);
        write(&mut w)?;
        w.flush()?;
        drop(w);
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub cfg: PulseConfig,
    pub gamma_grid: Vec<f64>,
    pub models: Vec<ModelKind>,
    pub include_analytic: bool,
    pub output_path: Option<PathBuf>,
    pub basis: BasisKind,
    pub opts: SimOptions,
    /// `None` uses [`default_workers`].
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn new(cfg: PulseConfig, gamma_grid: Vec<f64>) -> Self {
        SweepSpec {
            cfg,
            gamma_grid,
            models: ModelKind::ALL.to_vec(),
            include_analytic: false,
            output_path: None,
            basis: BasisKind::Bare,
            opts: SimOptions {
                sampling: 2,
                ..SimOptions::default()
            },
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.opts.validate()?;
        if self.gamma_grid.is_empty() {
            return Err(Error::InvalidParameter("empty gamma grid".into()));
        }
        if self.gamma_grid.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::InvalidParameter("gamma grid values must be finite and >= 0".into()));
        }
        if self.gamma_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("gamma grid must be strictly increasing".into()));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidParameter("no models selected".into()));
        }
        Ok(())
    }
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// `n` logarithmically spaced points on `[lo, hi]`, `lo > 0`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linear_grid(lo.log10(), hi.log10(), n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub model: ModelKind,
    pub p3_final: f64,
    pub p1_final: f64,
    pub norm_final: f64,
    pub p3_analytic: Option<f64>,
    /// Propagation or quadrature failure for this row; numeric fields are NaN.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub sequence: Sequence,
    pub include_analytic: bool,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn header(include_analytic: bool) -> &'static str {
        if include_analytic {
            "gammaT,model,p3_final,p1_final,norm_final,p3_analytic"
        } else {
            "gammaT,model,p3_final,p1_final,norm_final"
        }
    }

    pub fn rows_for(&self, model: ModelKind) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.model == model)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::header(self.include_analytic))?;
        for r in &self.rows {
            write!(
                out,
                "{},{},{},{},{}",
                num(r.gamma),
                r.model,
                num(r.p3_final),
                num(r.p1_final),
                num(r.norm_final)
            )?;
            if self.include_analytic {
                write!(out, ",{}", r.p3_analytic.map_or_else(|| "nan".to_string(), num))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        write_atomically(path, |f| self.write_csv(f))
    }
}

/// One grid point of a sweep, evaluated on its own.
pub fn sweep_point(spec: &SweepSpec, gamma: f64, model: ModelKind) -> SweepRow {
    let numeric = propagate(&spec.cfg, gamma, model, spec.basis, &spec.opts);
    let analytic = spec
        .include_analytic
        .then(|| weak_damping_p3(&spec.cfg, gamma, model));
    let mut row = SweepRow {
        gamma,
        model,
        p3_final: f64::NAN,
        p1_final: f64::NAN,
        norm_final: f64::NAN,
        p3_analytic: None,
        error: None,
    };
    match numeric {
        Ok(tr) => {
            row.p3_final = tr.p3_final;
            row.p1_final = tr.p1_final;
            row.norm_final = tr.norm_final;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    match analytic {
        Some(Ok(v)) => row.p3_analytic = Some(v),
        Some(Err(e)) if row.error.is_none() => row.error = Some(e.to_string()),
        _ => {}
    }
    row
}

/// Propagate every `(Γ, model)` pair on a bounded pool of worker threads.
///
/// Rows are ordered by `Γ`, then model; per-row failures are recorded in
/// [`SweepRow::error`] rather than aborting the sweep.
pub fn sweep_gamma(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let mut models = spec.models.clone();
    models.sort();
    models.dedup();
    let jobs: Vec<(f64, ModelKind)> = spec
        .gamma_grid
        .iter()
        .flat_map(|&g| models.iter().map(move |&m| (g, m)))
        .collect();
    let workers = spec.workers.unwrap_or_else(default_workers).clamp(1, jobs.len());

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(g, m)) = jobs.get(k) else { break };
                let row = sweep_point(spec, g, m);
                slots.lock().expect("sweep result lock")[k] = Some(row);
            });
        }
    });
    let rows = slots
        .into_inner()
        .expect("sweep result lock")
        .into_iter()
        .map(|r| r.expect("every sweep job produces a row"))
        .collect();
    let table = SweepTable {
        sequence: spec.cfg.sequence,
        include_analytic: spec.include_analytic,
        rows,
    };
    if let Some(path) = &spec.output_path {
        table.save_csv(path)?;
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// Post-pulse P₃ vs Γ, intuitive sequence, weak damping.
    Fig2,
    /// Post-pulse P₃ vs Γ, counterintuitive sequence, weak damping.
    Fig3a,
    /// Post-pulse P₃ vs Γ, counterintuitive sequence, logarithmic Γ range.
    Fig3b,
    /// Strong-damping populations, effective model, intuitive sequence.
    Fig4a,
    /// Strong-damping populations, phenomenological model, counterintuitive.
    Fig4b,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig2" => Ok(FigureId::Fig2),
            "fig3a" | "fig3" => Ok(FigureId::Fig3a),
            "fig3b" => Ok(FigureId::Fig3b),
            "fig4a" | "fig4" => Ok(FigureId::Fig4a),
            "fig4b" => Ok(FigureId::Fig4b),
            other => Err(Error::InvalidParameter(format!("unknown figure `{other}`"))),
        }
    }
}

/// Parse a `model-sequence` variant such as `effective-intuitive`.
pub fn parse_variant(s: &str) -> Result<(ModelKind, Sequence)> {
    let (m, seq) = s
        .split_once('-')
        .ok_or_else(|| Error::InvalidParameter(format!("variant `{s}` is not <model>-<sequence>")))?;
    Ok((m.parse()?, seq.parse()?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub figure: FigureId,
    pub alpha_t: f64,
    pub delta_t: f64,
    pub t_max_over_t: f64,
    /// Γ grid for the sweep figures; `None` selects the figure's default.
    pub gamma_grid: Option<Vec<f64>>,
    /// Γ for the time-trace figures.
    pub gamma: f64,
    /// Model and sequence for the time-trace figures.
    pub variant: Option<(ModelKind, Sequence)>,
    pub out_dir: PathBuf,
    pub opts: SimOptions,
    pub workers: Option<usize>,
}

impl FigureSpec {
    pub fn new(figure: FigureId, out_dir: impl Into<PathBuf>) -> Self {
        FigureSpec {
            figure,
            alpha_t: 10.0,
            delta_t: 1.0,
            t_max_over_t: PulseConfig::DEFAULT_T_MAX,
            gamma_grid: None,
            gamma: 500.0,
            variant: None,
            out_dir: out_dir.into(),
            opts: SimOptions::default(),
            workers: None,
        }
    }

    pub fn default_grid(figure: FigureId) -> Vec<f64> {
        match figure {
            FigureId::Fig3b => log_grid(1e-2, 1e3, 51),
            _ => linear_grid(0.0, 3.0, 61),
        }
    }

    pub fn default_variant(figure: FigureId) -> Option<(ModelKind, Sequence)> {
        match figure {
            FigureId::Fig4a => Some((ModelKind::Effective, Sequence::Intuitive)),
            FigureId::Fig4b => Some((ModelKind::Phenomenological, Sequence::Counterintuitive)),
            _ => None,
        }
    }

    fn sequence(&self) -> Sequence {
        match self.figure {
            FigureId::Fig2 => Sequence::Intuitive,
            FigureId::Fig3a | FigureId::Fig3b => Sequence::Counterintuitive,
            FigureId::Fig4a | FigureId::Fig4b => self.variant().1,
        }
    }

    fn variant(&self) -> (ModelKind, Sequence) {
        self.variant
            .or_else(|| Self::default_variant(self.figure))
            .unwrap_or((ModelKind::Effective, Sequence::Counterintuitive))
    }

    fn is_trace(&self) -> bool {
        matches!(self.figure, FigureId::Fig4a | FigureId::Fig4b)
    }

    fn pulse_config(&self) -> PulseConfig {
        PulseConfig::new(self.alpha_t, self.delta_t, self.sequence()).with_t_max(self.t_max_over_t)
    }

    /// File stem of the outputs: the figure name, with the model/sequence
    /// appended for time traces.
    pub fn stem(&self) -> String {
        if self.is_trace() {
            let (m, s) = self.variant();
            format!("fig4-{m}-{s}")
        } else {
            self.figure.name().to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigureData {
    Sweep(SweepTable),
    Trace(Trajectory),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedFigure {
    pub csv_path: PathBuf,
    pub svg_path: PathBuf,
    pub data: FigureData,
}

const MODEL_COLORS: [(&str, bool); 2] = [("#1f5fbf", true), ("#c0392b", false)];

fn sweep_plot(spec: &FigureSpec, table: &SweepTable) -> LinePlot {
    let title = format!(
        "P3(+inf) vs Gamma, {} sequence (alphaT={}, deltaT={})",
        table.sequence,
        num(spec.alpha_t),
        num(spec.delta_t)
    );
    let mut plot = LinePlot::new(title, "Gamma T", "P3 post-pulse");
    plot.log_x = spec.figure == FigureId::Fig3b;
    plot.y_range = Some((0.0, 1.0));
    for (model, (color, dashed)) in ModelKind::ALL.iter().zip(MODEL_COLORS) {
        let pts: Vec<(f64, f64)> = table.rows_for(*model).map(|r| (r.gamma, r.p3_final)).collect();
        if pts.is_empty() {
            continue;
        }
        let s = Series::new(model.name(), color, pts);
        plot.series.push(if dashed { s.dashed() } else { s });
    }
    if table.include_analytic {
        for model in ModelKind::ALL {
            let pts: Vec<(f64, f64)> = table
                .rows_for(model)
                .filter_map(|r| r.p3_analytic.map(|a| (r.gamma, a)))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let color = if model == ModelKind::Effective { "#7fa8e0" } else { "#e59a90" };
            plot.series.push(Series::new(format!("{model} (analytic)"), color, pts).dashed());
        }
    }
    plot
}

fn trace_plot(spec: &FigureSpec, tr: &Trajectory) -> LinePlot {
    let (model, seq) = spec.variant();
    let title = format!(
        "{model} model, {seq} sequence (alphaT={}, GammaT={}, deltaT={})",
        num(spec.alpha_t),
        num(spec.gamma),
        num(spec.delta_t)
    );
    let mut plot = LinePlot::new(title, "t / T", "population");
    plot.y_range = Some((0.0, 1.0));
    let zip = |ys: &[f64]| tr.times.iter().copied().zip(ys.iter().copied()).collect();
    plot.series.push(Series::new("P1", "#c0392b", zip(&tr.p1)));
    plot.series.push(Series::new("P2", "#27ae60", zip(&tr.p2)).dashed());
    plot.series.push(Series::new("P3", "#1f5fbf", zip(&tr.p3)).dashed());
    plot.series.push(Series::new("norm", "#7f7f7f", zip(&tr.norm)));
    plot
}

/// Compute a figure's data and write `<stem>.csv` and `<stem>.svg` into
/// `spec.out_dir`.
pub fn render_figure(spec: &FigureSpec) -> Result<RenderedFigure> {
    fs::create_dir_all(&spec.out_dir)?;
    let stem = spec.stem();
    let csv_path = spec.out_dir.join(format!("{stem}.csv"));
    let svg_path = spec.out_dir.join(format!("{stem}.svg"));
    let cfg = spec.pulse_config();

    let (data, plot) = if spec.is_trace() {
        let (model, _) = spec.variant();
        let tr = propagate(&cfg, spec.gamma, model, BasisKind::Bare, &spec.opts)?;
        let plot = trace_plot(spec, &tr);
        (FigureData::Trace(tr), plot)
    } else {
        let grid = spec
            .gamma_grid
            .clone()
            .unwrap_or_else(|| FigureSpec::default_grid(spec.figure));
        let sweep = SweepSpec {
            include_analytic: spec.figure != FigureId::Fig3b,
            workers: spec.workers,
            opts: SimOptions {
                sampling: 2,
                ..spec.opts
            },
            ..SweepSpec::new(cfg, grid)
        };
        let table = sweep_gamma(&sweep)?;
        let plot = sweep_plot(spec, &table);
        (FigureData::Sweep(table), plot)
    };

    let written = match &data {
        FigureData::Sweep(t) => t.save_csv(&csv_path),
        FigureData::Trace(t) => t.save_csv(&csv_path),
    }
    .and_then(|_| write_atomically(&svg_path, |f| f.write_all(plot.render().as_bytes())));
    if let Err(e) = written {
        let _ = fs::remove_file(&csv_path);
        let _ = fs::remove_file(&svg_path);
        return Err(e);
    }
    Ok(RenderedFigure {
        csv_path,
        svg_path,
        data,
    })
}
