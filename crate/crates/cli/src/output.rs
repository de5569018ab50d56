use std::io::{self, IsTerminal, Write};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
}

impl Status {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Fail
        }
    }
}

/// What goes on one JSON line.
#[derive(Debug, Serialize)]
pub struct OutputRecord<'a> {
    pub command: &'a str,
    pub payload: Value,
    pub status: Status,
}

/// Writes records in the chosen format and remembers whether all were ok.
pub struct Sink {
    format: Format,
    color: bool,
    out: Box<dyn Write>,
    csv_header_done: bool,
    failures: usize,
}

impl Sink {
    pub fn stdout(format: Format) -> Self {
        let color = std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && io::stdout().is_terminal();
        Sink {
            format,
            color,
            out: Box::new(io::stdout().lock()),
            csv_header_done: false,
            failures: 0,
        }
    }

    pub fn all_ok(&self) -> bool {
        self.failures == 0
    }

    pub fn format(&self) -> Format {
        self.format
    }

    /// One record. `text` is the table row; `csv` the comma-separated row with its header.
    pub fn emit<P: Serialize>(
        &mut self,
        command: &str,
        payload: &P,
        status: Status,
        text: &str,
        csv: Option<(&str, String)>,
    ) -> io::Result<()> {
        if status == Status::Fail {
            self.failures += 1;
        }
        match self.format {
            Format::Json => {
                let record = OutputRecord {
                    command,
                    payload: serde_json::to_value(payload).map_err(io::Error::other)?,
                    status,
                };
                serde_json::to_writer(&mut self.out, &record).map_err(io::Error::other)?;
                writeln!(self.out)
            }
            Format::Csv if csv.is_some() => {
                let (header, row) = csv.unwrap();
                if !self.csv_header_done {
                    writeln!(self.out, "{header}")?;
                    self.csv_header_done = true;
                }
                writeln!(self.out, "{row}")
            }
            _ => {
                let mark = match (status, self.color) {
                    (Status::Ok, true) => "\x1b[32mok\x1b[0m  ",
                    (Status::Fail, true) => "\x1b[31mFAIL\x1b[0m",
                    (Status::Ok, false) => "ok  ",
                    (Status::Fail, false) => "FAIL",
                };
                writeln!(self.out, "{mark}  {text}")
            }
        }
    }

    /// Free-form lines for table mode only (headings, long listings).
    pub fn note(&mut self, text: &str) -> io::Result<()> {
        if self.format == Format::Table {
            writeln!(self.out, "{text}")?;
        }
        Ok(())
    }
}
