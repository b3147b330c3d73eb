//! Plot scripts written next to the data files. Run with `gnuplot -p <file>.gp`.

pub const ACF: &str = r#"# Global, double-kernel and (if present) d*-corrected autocovariances.
set datafile separator ','
set key autotitle columnhead
set xlabel 'lag'
set style data linespoints
plot for [c=2:*] 'acf.csv' using 1:c
"#;

pub const PERIODOGRAM: &str = r#"# Full-sample periodogram on [0, pi].
set datafile separator ','
set xlabel 'frequency'
set ylabel 'I(omega)'
plot 'periodogram.csv' using 1:2 with impulses title 'periodogram'
"#;

/// Overlays every local periodogram file in the directory.
pub const LOCAL: &str = r#"# Local periodograms at the requested time fractions.
set datafile separator ','
set xlabel 'frequency'
files = system('ls local_periodogram_u*.csv')
plot for [f in files] f using 1:2 with lines title f
"#;
