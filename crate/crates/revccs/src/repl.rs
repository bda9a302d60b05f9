//! Terminal stepper: numbered menu of enabled transitions.

use std::io::{self, BufRead, Write};

use revccs_core::names::render_set;

use crate::session::Session;

pub fn render_menu(session: &Session) -> String {
    let mut out =
        format!("rccs: {}\nmarking: {}\nEnabled transitions:\n", session.rccs(), render_set(session.marking()));
    for (i, t) in session.enabled().iter().enumerate() {
        out.push_str(&format!("{}) {t}\n", i + 1));
    }
    out
}

/// Runs the stepper until `quit` or end of input.
pub fn run<R: BufRead, W: Write>(session: &mut Session, input: R, mut output: W) -> io::Result<()> {
    let mut lines = input.lines();
    write!(output, "{}", render_menu(session))?;
    loop {
        write!(output, "> ")?;
        output.flush()?;
        let Some(line) = lines.next() else {
            writeln!(output)?;
            return Ok(());
        };
        match line?.trim() {
            "" => continue,
            "quit" | "q" => return Ok(()),
            "history" => {
                for (i, t) in session.history().iter().enumerate() {
                    writeln!(output, "{}. {t}", i + 1)?;
                }
                continue;
            }
            "undo" => match session.undo() {
                Ok(()) => {}
                Err(e) => {
                    writeln!(output, "{e}")?;
                    continue;
                }
            },
            choice => {
                let menu = session.enabled();
                let picked = choice.parse::<usize>().ok().and_then(|i| i.checked_sub(1)).and_then(|i| menu.get(i));
                match picked {
                    Some(t) => {
                        if let Err(e) = session.fire_transition(t.clone()) {
                            writeln!(output, "{e}")?;
                            continue;
                        }
                    }
                    None => {
                        writeln!(
                            output,
                            "invalid selection `{choice}`: pick 1 to {}, undo, history or quit",
                            menu.len()
                        )?;
                        continue;
                    }
                }
            }
        }
        write!(output, "{}", render_menu(session))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn transcript(term: &str, input: &str) -> String {
        let mut s = Session::new(term).unwrap();
        let mut out = Vec::new();
        run(&mut s, input.as_bytes(), &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn invalid_selection_reprompts() {
        let out = transcript("a.0", "7\nx\n1\nquit\n");
        assert_eq!(out.matches("invalid selection").count(), 2);
        assert!(out.contains("1) <-a?"));
    }

    #[test]
    fn history_and_undo() {
        let out = transcript("a.b", "1\n1\nhistory\nundo\nundo\nundo\n");
        assert!(out.contains("1. ->a?\n2. ->^a?.b?\n"));
        assert!(out.contains("Enabled transitions:\n1) ->a?\n> nothing to undo\n> \n"));
    }
}
