//! Canonical text form. Quantifier bodies extend as far right as possible,
//! so a quantifier used as an operand is always parenthesized, and a binary
//! body is parenthesized for readability. Nested `&`/`|` of the same kind
//! keep their grouping.

use std::fmt::{self, Write};

use super::ast::{Formula, SetKind, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self);
        f.write_str(&s)
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(_) => 2,
        Formula::And(_) => 3,
        _ => 4,
    }
}

fn write_operand(out: &mut String, f: &Formula, parens: bool) {
    if parens || f.is_quantifier() {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

fn write_terms(out: &mut String, ts: &[Term]) {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(t.name());
    }
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Rel(r, ts) => {
            out.push_str(r);
            out.push('(');
            write_terms(out, ts);
            out.push(')');
        }
        Formula::SetMember(x, t) => {
            let _ = write!(out, "{x}({t})");
        }
        Formula::Eq(a, b) => {
            let _ = write!(out, "{a} = {b}");
        }
        Formula::Not(g) => {
            out.push('~');
            write_operand(out, g, prec(g) < 4);
        }
        Formula::And(gs) => {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                write_operand(out, g, prec(g) <= 3);
            }
        }
        Formula::Or(gs) => {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                write_operand(out, g, prec(g) <= 2);
            }
        }
        Formula::Implies(a, b) => {
            write_operand(out, a, prec(a) <= 1);
            out.push_str(" -> ");
            write_operand(out, b, false);
        }
        Formula::Exists(v, g) => write_quant(out, &format!("E {v}"), g),
        Formula::Forall(v, g) => write_quant(out, &format!("A {v}"), g),
        Formula::CountExists(n, v, g) => write_quant(out, &format!("E={n} {v}"), g),
        Formula::SetExists(k, x, g) => {
            let kw = if *k == SetKind::Weak { "ESW" } else { "ES" };
            write_quant(out, &format!("{kw} {x}"), g)
        }
        Formula::SetForall(k, x, g) => {
            let kw = if *k == SetKind::Weak { "ASW" } else { "AS" };
            write_quant(out, &format!("{kw} {x}"), g)
        }
    }
}

fn write_quant(out: &mut String, head: &str, body: &Formula) {
    out.push_str(head);
    out.push_str(". ");
    if body.is_quantifier() {
        write_formula(out, body);
    } else {
        write_operand(out, body, prec(body) < 4);
    }
}
