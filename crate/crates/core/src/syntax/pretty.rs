use std::fmt::{self, Write};

use super::{BExp, Expr};

// BExp levels: 0 = or, 1 = and, 2 = not/atomic.
pub(super) fn write_bexp(f: &mut fmt::Formatter<'_>, b: &BExp, level: u8) -> fmt::Result {
    let own = match b {
        BExp::Or(..) => 0,
        BExp::And(..) => 1,
        _ => 2,
    };
    let parens = own < level;
    if parens {
        f.write_char('(')?;
    }
    match b {
        BExp::False => f.write_char('0')?,
        BExp::True => f.write_char('1')?,
        BExp::Prim(t) => f.write_str(t)?,
        BExp::Not(b) => {
            f.write_char('!')?;
            write_bexp(f, b, 2)?;
        }
        BExp::Or(b, c) => {
            write_bexp(f, b, 0)?;
            f.write_str(" + ")?;
            write_bexp(f, c, 1)?;
        }
        BExp::And(b, c) => {
            write_bexp(f, b, 1)?;
            f.write_str(" . ")?;
            write_bexp(f, c, 2)?;
        }
    }
    if parens {
        f.write_char(')')?;
    }
    Ok(())
}

// Expr levels: 0 = choice, 1 = sequence, 2 = primary/postfix.
pub(super) fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, level: u8) -> fmt::Result {
    let own = match e {
        Expr::GuardedChoice(..) => 0,
        Expr::WeightedChoice(..) if e.as_scaling().is_none() => 0,
        Expr::Seq(..) => 1,
        _ => 2,
    };
    let parens = own < level;
    if parens {
        f.write_char('(')?;
    }
    match e {
        Expr::Test(b) => match b {
            BExp::Or(..) | BExp::And(..) => {
                f.write_char('(')?;
                write_bexp(f, b, 0)?;
                f.write_char(')')?;
            }
            _ => write_bexp(f, b, 2)?,
        },
        Expr::Action(p) => f.write_str(p)?,
        Expr::Output(v) => f.write_str(v)?,
        Expr::GuardedChoice(l, b, r) => {
            write_expr(f, l, 1)?;
            f.write_str(" +[")?;
            write_bexp(f, b, 0)?;
            f.write_str("] ")?;
            write_expr(f, r, 1)?;
        }
        Expr::WeightedChoice(l, r, s, rt) => match e.as_scaling() {
            Some(w) => write!(f, "@{w}")?,
            None => {
                write_expr(f, l, 1)?;
                write!(f, " [{r}, {s}] ")?;
                write_expr(f, rt, 1)?;
            }
        },
        Expr::Seq(a, b) => {
            write_expr(f, a, 2)?;
            f.write_str(" ; ")?;
            write_expr(f, b, 1)?;
        }
        Expr::Loop(body, b) => {
            write_expr(f, body, 2)?;
            f.write_str("^(")?;
            write_bexp(f, b, 0)?;
            f.write_char(')')?;
        }
    }
    if parens {
        f.write_char(')')?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use crate::semiring::SemiringId;
    use crate::syntax::{BExp, Expr};

    #[test]
    fn small_forms() {
        assert_eq!(Expr::one().to_string(), "1");
        assert_eq!(
            Expr::seq(Expr::action("p"), Expr::output("v")).to_string(),
            "p ; v"
        );
        let two = SemiringId::ExtNaturals.int(2).unwrap();
        assert_eq!(
            Expr::seq(Expr::scale(two), Expr::action("p")).to_string(),
            "@2 ; p"
        );
        let b = BExp::or(
            BExp::prim("a"),
            BExp::and(BExp::prim("b"), BExp::not(BExp::prim("c"))),
        );
        assert_eq!(b.to_string(), "a + b . !c");
        assert_eq!(
            Expr::looping(Expr::test(b), BExp::True).to_string(),
            "(a + b . !c)^(1)"
        );
    }
}
