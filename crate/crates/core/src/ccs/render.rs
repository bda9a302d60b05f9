use core::fmt;

use super::Process;

fn level(p: &Process) -> i8 {
    match p {
        Process::Rec(..) => -1,
        Process::Par(..) => 0,
        Process::Sum(branches) if branches.len() >= 2 => 1,
        Process::Sum(branches) if branches.len() == 1 => 2,
        Process::Restrict(..) => 3,
        Process::Sum(_) | Process::Var(_) => 4,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, p: &Process, min_level: i8) -> fmt::Result {
    if level(p) < min_level {
        f.write_str("(")?;
        write_at(f, p, -1)?;
        return f.write_str(")");
    }
    match p {
        Process::Sum(branches) if branches.is_empty() => f.write_str("0"),
        Process::Sum(branches) => {
            for (i, (a, q)) in branches.iter().enumerate() {
                if i > 0 {
                    f.write_str(" + ")?;
                }
                write!(f, "{}.", a.ccs_text())?;
                write_at(f, q, 2)?;
            }
            Ok(())
        }
        Process::Par(l, r) => {
            write_at(f, l, 0)?;
            f.write_str(" | ")?;
            write_at(f, r, 1)
        }
        Process::Restrict(q, a) => {
            write_at(f, q, 3)?;
            write!(f, "\\{a}")
        }
        Process::Var(x) => f.write_str(x),
        Process::Rec(x, body) => {
            write!(f, "rec {x}. ")?;
            write_at(f, body, -1)
        }
    }
}

/// Canonical text with minimal parentheses and explicit `.0` terminators.
/// Parsing the output yields the same term.
impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, -1)
    }
}
