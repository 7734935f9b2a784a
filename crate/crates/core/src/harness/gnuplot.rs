//! Gnuplot scripts that read the emitted CSV files.

use std::path::Path;

use super::{io_error, HarnessError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plot {
    Spectrum,
    Widths,
    Compare,
    TableD,
}

pub fn script(plot: Plot, csv_name: &str) -> String {
    let head = format!("set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\nset output '{}.png'\n", stem(csv_name));
    let body = match plot {
        Plot::Spectrum => format!("set xlabel 'phi'\nset ylabel 'E_k'\nplot '{csv_name}' using 3:6 with points pt 7 ps 0.4 notitle\n"),
        Plot::Widths => format!(
            "set xlabel '1/h'\nset ylabel 'ln Gamma'\nplot '{csv_name}' using (1/$1):(log($5)) with points pt 7 title 'complex scaling', \\\n     '' using (1/$1):(log($8)) with points pt 6 title 'shooting'\n"
        ),
        Plot::Compare => format!(
            "set xlabel 'E_bs'\nset ylabel 'deviation'\nset logscale y\nplot '{csv_name}' using 5:8 with points pt 7 title 'direct', \\\n     '' using 5:9 with points pt 6 title 'hard wall'\n"
        ),
        Plot::TableD => format!("set xlabel 'z'\nset ylabel 'Re D_nu(z)'\nplot '{csv_name}' using 2:4 with points pt 7 ps 0.4 notitle\n"),
    };
    head + &body
}

fn stem(name: &str) -> &str {
    name.strip_suffix(".csv").unwrap_or(name)
}

/// Writes `<csv stem>.gp` next to the CSV.
pub fn write_script(dir: &Path, plot: Plot, csv_name: &str) -> Result<(), HarnessError> {
    let path = dir.join(format!("{}.gp", stem(csv_name)));
    std::fs::write(&path, script(plot, csv_name)).map_err(|e| io_error(&path, e))
}
