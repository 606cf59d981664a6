//! A nine-tape normalizer working directly on Θ-strings.
//!
//! Each iteration scans `Current` for the leftmost redex whose argument is a
//! value, splits the string around it, substitutes, and glues the pieces back
//! together. Every single-symbol tape action (read, write, head move, stack
//! push or pop) adds one to the operation count.

use std::fmt;
use std::io;
use std::mem;

use thiserror::Error;

use crate::theta::{decode_theta, read_var_block, ThetaError, ThetaString, ThetaSymbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StackSymbol {
    /// An abstraction whose body is still open.
    ALambda,
    /// An application whose function part is still open.
    FApp,
    /// An application whose argument part is still open.
    SApp,
}

impl fmt::Display for StackSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StackSymbol::ALambda => "A_λ",
            StackSymbol::FApp => "F_@",
            StackSymbol::SApp => "S_@",
        })
    }
}

/// Applies one scanned symbol to a term stack and returns the number of
/// push/pop operations it took. Binary digits leave the stack alone.
///
/// `@` pushes `F_@`, `λ` pushes `A_λ`, and `▶` pops `S_@`/`A_λ` entries until
/// it meets an `F_@`, which it turns into `S_@`.
pub fn stack_update(stack: &mut Vec<StackSymbol>, sym: ThetaSymbol) -> u64 {
    stack_update_counting(stack, sym, &mut 0)
}

fn stack_update_counting(
    stack: &mut Vec<StackSymbol>,
    sym: ThetaSymbol,
    lambdas_closed: &mut u64,
) -> u64 {
    match sym {
        ThetaSymbol::App => {
            stack.push(StackSymbol::FApp);
            1
        }
        ThetaSymbol::Lambda => {
            stack.push(StackSymbol::ALambda);
            1
        }
        ThetaSymbol::Var => {
            let mut ops = 0;
            while let Some(top) = stack.pop() {
                ops += 1;
                match top {
                    StackSymbol::FApp => {
                        stack.push(StackSymbol::SApp);
                        ops += 1;
                        break;
                    }
                    StackSymbol::ALambda => *lambdas_closed += 1,
                    StackSymbol::SApp => {}
                }
            }
            ops
        }
        ThetaSymbol::Zero | ThetaSymbol::One => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MrError {
    #[error("malformed input: {0}")]
    Malformed(#[from] ThetaError),
    #[error("malformed Current tape at offset {0}")]
    MalformedCurrent(usize),
}

/// Cost of one completed iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationRecord {
    /// Length of `Current` before and after.
    pub tl_before: u64,
    pub tl_after: u64,
    pub ops: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MachineRState {
    pub current: Vec<ThetaSymbol>,
    pub preredex: Vec<ThetaSymbol>,
    pub functional: Vec<ThetaSymbol>,
    pub argument: Vec<ThetaSymbol>,
    pub postredex: Vec<ThetaSymbol>,
    pub reduct: Vec<ThetaSymbol>,
    pub stack_term: Vec<StackSymbol>,
    pub stack_redex: Vec<StackSymbol>,
    /// Binary, most significant bit first.
    pub counter: Vec<ThetaSymbol>,
    pub op_count: u64,
    pub iterations: Vec<IterationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanResult {
    Found,
    NoRedex,
}

fn theta(v: &[ThetaSymbol]) -> String {
    ThetaString(v.to_vec()).to_string()
}

impl MachineRState {
    pub fn new(input: &ThetaString) -> Result<MachineRState, MrError> {
        decode_theta(input)?;
        Ok(MachineRState {
            current: input.0.clone(),
            ..MachineRState::default()
        })
    }

    pub fn current(&self) -> ThetaString {
        ThetaString(self.current.clone())
    }

    /// Whether every tape other than `Current` is blank.
    pub fn is_clean(&self) -> bool {
        self.preredex.is_empty()
            && self.functional.is_empty()
            && self.argument.is_empty()
            && self.postredex.is_empty()
            && self.reduct.is_empty()
            && self.stack_term.is_empty()
            && self.stack_redex.is_empty()
            && self.counter.is_empty()
    }

    /// Copies the subterm of `Current` starting at `start` onto `dest`,
    /// using `StackRedex` to find where it ends. Returns the end offset.
    fn copy_subterm(&mut self, start: usize, dest: Dest) -> Result<usize, MrError> {
        debug_assert!(self.stack_redex.is_empty());
        let mut i = start;
        loop {
            let sym = *self.current.get(i).ok_or(MrError::MalformedCurrent(i))?;
            let end = match sym {
                ThetaSymbol::Var => read_var_block(&self.current, i)?.1,
                ThetaSymbol::App | ThetaSymbol::Lambda => i + 1,
                _ => return Err(MrError::MalformedCurrent(i)),
            };
            self.op_count += stack_update(&mut self.stack_redex, sym);
            for k in i..end {
                let s = self.current[k];
                self.op_count += 4;
                self.tape(dest).push(s);
            }
            i = end;
            if sym == ThetaSymbol::Var && self.stack_redex.is_empty() {
                return Ok(i);
            }
        }
    }

    fn tape(&mut self, dest: Dest) -> &mut Vec<ThetaSymbol> {
        match dest {
            Dest::Functional => &mut self.functional,
            Dest::Argument => &mut self.argument,
        }
    }

    /// Step 1: locate the leftmost redex with a value argument and split
    /// `Current` into `Preredex`, `Functional`, `Argument` and `Postredex`.
    pub fn find_redex_pass(&mut self) -> Result<ScanResult, MrError> {
        let mut i = 0;
        while i < self.current.len() {
            match self.current[i] {
                ThetaSymbol::App => {
                    self.op_count += 4 + stack_update(&mut self.stack_term, ThetaSymbol::App);
                    self.preredex.push(ThetaSymbol::App);
                    i += 1;
                }
                ThetaSymbol::Var => {
                    let (_, end) = read_var_block(&self.current, i)?;
                    for k in i..end {
                        self.op_count += 4;
                        self.preredex.push(self.current[k]);
                    }
                    self.op_count += stack_update(&mut self.stack_term, ThetaSymbol::Var);
                    i = end;
                }
                ThetaSymbol::Lambda => {
                    let end = self.copy_subterm(i, Dest::Functional)?;
                    // Peek at the symbol after the abstraction.
                    self.op_count += 1;
                    let next_is_value = matches!(
                        self.current.get(end),
                        Some(ThetaSymbol::Lambda | ThetaSymbol::Var)
                    );
                    if self.stack_term.last() == Some(&StackSymbol::FApp) && next_is_value {
                        let arg_end = self.copy_subterm(end, Dest::Argument)?;
                        for k in arg_end..self.current.len() {
                            self.op_count += 4;
                            self.postredex.push(self.current[k]);
                        }
                        return Ok(ScanResult::Found);
                    }
                    let moved = mem::take(&mut self.functional);
                    // read, write, and erase each symbol, plus head moves
                    self.op_count += 5 * moved.len() as u64;
                    self.preredex.extend(moved);
                    self.op_count += stack_update(&mut self.stack_term, ThetaSymbol::Var);
                    i = end;
                }
                ThetaSymbol::Zero | ThetaSymbol::One => return Err(MrError::MalformedCurrent(i)),
            }
        }
        self.erase_scratch();
        Ok(ScanResult::NoRedex)
    }

    /// Step 2: write the body of `Functional` to `Reduct`, replacing each
    /// occurrence of the erased binder by a copy of `Argument`.
    pub fn substitute_pass(&mut self) -> Result<(), MrError> {
        let func = mem::take(&mut self.functional);
        if func.first() != Some(&ThetaSymbol::Lambda) {
            return Err(MrError::MalformedCurrent(0));
        }
        self.op_count += 2;
        self.counter = vec![ThetaSymbol::Zero];
        self.op_count += 2;
        let mut i = 1;
        while i < func.len() {
            let sym = func[i];
            match sym {
                ThetaSymbol::Lambda | ThetaSymbol::App => {
                    self.op_count += 4 + stack_update(&mut self.stack_redex, sym);
                    self.reduct.push(sym);
                    if sym == ThetaSymbol::Lambda {
                        self.op_count += counter_increment(&mut self.counter);
                    }
                    i += 1;
                }
                ThetaSymbol::Var => {
                    let (_, end) = read_var_block(&func, i)?;
                    let digits = &func[i + 1..end];
                    let (hit, cmp_ops) = counter_matches(&self.counter, digits);
                    self.op_count += cmp_ops;
                    if hit {
                        for &s in &self.argument {
                            self.op_count += 4;
                            self.reduct.push(s);
                        }
                    } else {
                        for &s in &func[i..end] {
                            self.op_count += 4;
                            self.reduct.push(s);
                        }
                    }
                    let mut closed = 0;
                    self.op_count += stack_update_counting(&mut self.stack_redex, sym, &mut closed);
                    for _ in 0..closed {
                        self.op_count += counter_decrement(&mut self.counter);
                    }
                    i = end;
                }
                ThetaSymbol::Zero | ThetaSymbol::One => return Err(MrError::MalformedCurrent(i)),
            }
            debug_assert_eq!(
                counter_value(&self.counter),
                self.stack_redex
                    .iter()
                    .filter(|s| **s == StackSymbol::ALambda)
                    .count(),
                "Counter out of step with λ-nesting depth"
            );
        }
        // erasing Functional
        self.op_count += 2 * func.len() as u64;
        Ok(())
    }

    /// Steps 3 and 4: rebuild `Current` from the pieces (dropping the redex's
    /// own `@` from the end of `Preredex`) and blank every other tape.
    pub fn reassemble_pass(&mut self) {
        let mut pre = mem::take(&mut self.preredex);
        if pre.pop() == Some(ThetaSymbol::App) {
            self.op_count += 2;
        }
        let old = self.current.len() as u64;
        self.op_count += 2 * old;
        let reduct = mem::take(&mut self.reduct);
        let post = mem::take(&mut self.postredex);
        let mut next = Vec::with_capacity(pre.len() + reduct.len() + post.len());
        for part in [pre, reduct, post] {
            self.op_count += 4 * part.len() as u64;
            self.op_count += 2 * part.len() as u64;
            next.extend(part);
        }
        self.current = next;
        self.erase_scratch();
    }

    fn erase_scratch(&mut self) {
        let lens = [
            self.preredex.len(),
            self.functional.len(),
            self.argument.len(),
            self.postredex.len(),
            self.reduct.len(),
            self.stack_term.len(),
            self.stack_redex.len(),
            self.counter.len(),
        ];
        self.op_count += 2 * lens.iter().sum::<usize>() as u64;
        self.preredex.clear();
        self.functional.clear();
        self.argument.clear();
        self.postredex.clear();
        self.reduct.clear();
        self.stack_term.clear();
        self.stack_redex.clear();
        self.counter.clear();
    }

    /// One full iteration. Returns `false` when `Current` is already normal.
    pub fn iterate(&mut self) -> Result<bool, MrError> {
        let before = self.op_count;
        let tl_before = self.current.len() as u64;
        if self.find_redex_pass()? == ScanResult::NoRedex {
            return Ok(false);
        }
        self.substitute_pass()?;
        self.reassemble_pass();
        self.iterations.push(IterationRecord {
            tl_before,
            tl_after: self.current.len() as u64,
            ops: self.op_count - before,
        });
        Ok(true)
    }

    pub fn describe(&self) -> String {
        format!(
            "Current={} Preredex={} Functional={} Argument={} Postredex={} Reduct={}",
            theta(&self.current),
            theta(&self.preredex),
            theta(&self.functional),
            theta(&self.argument),
            theta(&self.postredex),
            theta(&self.reduct)
        )
    }
}

#[derive(Clone, Copy)]
enum Dest {
    Functional,
    Argument,
}

fn counter_value(c: &[ThetaSymbol]) -> usize {
    c.iter()
        .fold(0, |n, s| 2 * n + usize::from(*s == ThetaSymbol::One))
}

fn counter_increment(c: &mut Vec<ThetaSymbol>) -> u64 {
    let mut ops = 0;
    for s in c.iter_mut().rev() {
        ops += 2;
        if *s == ThetaSymbol::Zero {
            *s = ThetaSymbol::One;
            return ops;
        }
        *s = ThetaSymbol::Zero;
    }
    c.insert(0, ThetaSymbol::One);
    ops + 2
}

fn counter_decrement(c: &mut Vec<ThetaSymbol>) -> u64 {
    let mut ops = 0;
    for s in c.iter_mut().rev() {
        ops += 2;
        if *s == ThetaSymbol::One {
            *s = ThetaSymbol::Zero;
            break;
        }
        *s = ThetaSymbol::One;
    }
    if c.len() > 1 && c[0] == ThetaSymbol::Zero {
        c.remove(0);
        ops += 2;
    }
    ops
}

/// Compares a variable's index digits with the counter.
fn counter_matches(c: &[ThetaSymbol], digits: &[ThetaSymbol]) -> (bool, u64) {
    if digits.is_empty() {
        return (false, 1);
    }
    let ops = 2 * c.len().min(digits.len()) as u64 + 1;
    (c == digits, ops)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrRun {
    pub output: ThetaString,
    pub op_count: u64,
    pub iterations: Vec<IterationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MrOutcome {
    Normal(MrRun),
    FuelExhausted(MrRun),
}

impl MrOutcome {
    pub fn run(&self) -> &MrRun {
        match self {
            MrOutcome::Normal(r) | MrOutcome::FuelExhausted(r) => r,
        }
    }
}

/// Iterates until no redex is left or `fuel_iterations` iterations have run.
pub fn mr_normalize(input: &ThetaString, fuel_iterations: u64) -> Result<MrOutcome, MrError> {
    let mut st = MachineRState::new(input)?;
    loop {
        if st.iterations.len() as u64 >= fuel_iterations {
            // Decide whether the fuel actually ran out or the term is normal.
            let mut probe = st.clone();
            if probe.find_redex_pass()? == ScanResult::NoRedex {
                st.op_count = probe.op_count;
                break;
            }
            return Ok(MrOutcome::FuelExhausted(MrRun {
                output: st.current(),
                op_count: st.op_count,
                iterations: st.iterations,
            }));
        }
        if !st.iterate()? {
            break;
        }
    }
    Ok(MrOutcome::Normal(MrRun {
        output: st.current(),
        op_count: st.op_count,
        iterations: st.iterations,
    }))
}

/// CSV with header `iteration,tl_before,tl_after,ops`.
pub fn write_iterations_csv<W: io::Write>(records: &[IterationRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "tl_before", "tl_after", "ops"])?;
    for (i, r) in records.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            r.tl_before.to_string(),
            r.tl_after.to_string(),
            r.ops.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{normalize, Strategy};
    use crate::syntax::parse_term;
    use crate::term::substitute_top;
    use crate::theta::encode_theta;
    use StackSymbol::*;

    fn th(s: &str) -> ThetaString {
        ThetaString::parse(s).unwrap()
    }

    fn table_one() -> ThetaString {
        encode_theta(&parse_term("(\\x.\\y.x y y)(\\z.z)(\\w.w)").unwrap())
    }

    #[test]
    fn stack_evolution() {
        let mut st = Vec::new();
        let mut seen = Vec::new();
        for s in th("@λ▶0λ▶0").0 {
            stack_update(&mut st, s);
            seen.push(st.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![FApp],
                vec![FApp, ALambda],
                vec![SApp],
                vec![SApp],
                vec![SApp, ALambda],
                vec![],
                vec![],
            ]
        );
        let mut empty = Vec::new();
        assert_eq!(stack_update(&mut empty, ThetaSymbol::Var), 0);
        let mut one = vec![FApp];
        stack_update(&mut one, ThetaSymbol::App);
        assert_eq!(one, vec![FApp, FApp]);
    }

    #[test]
    fn table_one_scan() {
        let mut st = MachineRState::new(&table_one()).unwrap();
        assert_eq!(st.find_redex_pass().unwrap(), ScanResult::Found);
        assert_eq!(theta(&st.preredex), "@@");
        assert_eq!(theta(&st.functional), "λλ@@▶1▶0▶0");
        assert_eq!(theta(&st.argument), "λ▶0");
        assert_eq!(theta(&st.postredex), "λ▶0");
        st.substitute_pass().unwrap();
        assert_eq!(theta(&st.reduct), "λ@@λ▶0▶0▶0");
        st.reassemble_pass();
        assert_eq!(st.current().to_string(), "@λ@@λ▶0▶0▶0λ▶0");
        assert!(st.is_clean());
    }

    #[test]
    fn value_has_no_redex() {
        let mut st = MachineRState::new(&th("λ▶0")).unwrap();
        assert_eq!(st.find_redex_pass().unwrap(), ScanResult::NoRedex);
        assert_eq!(st.current().to_string(), "λ▶0");
        assert!(st.is_clean());
    }

    #[test]
    fn inner_redex_found_first() {
        let t = parse_term("(\\x.x)((\\y.y)(\\z.z))").unwrap();
        let mut st = MachineRState::new(&encode_theta(&t)).unwrap();
        assert_eq!(st.find_redex_pass().unwrap(), ScanResult::Found);
        assert_eq!(theta(&st.preredex), "@λ▶0@");
        assert_eq!(theta(&st.functional), "λ▶0");
        assert_eq!(theta(&st.argument), "λ▶0");
        assert!(st.postredex.is_empty());
    }

    #[test]
    fn identity_redex() {
        let r = mr_normalize(&th("@λ▶0λ▶0"), 10).unwrap();
        let MrOutcome::Normal(run) = r else {
            panic!("expected a normal form")
        };
        assert_eq!(run.output.to_string(), "λ▶0");
        assert_eq!(run.iterations.len(), 1);
        let rec = run.iterations[0];
        assert_eq!((rec.tl_before, rec.tl_after), (7, 3));
    }

    #[test]
    fn root_redex_reassembles_to_reduct() {
        let mut st = MachineRState::new(&th("@λλ▶1λ▶0")).unwrap();
        st.find_redex_pass().unwrap();
        assert_eq!(theta(&st.preredex), "@");
        st.substitute_pass().unwrap();
        let reduct = st.reduct.clone();
        st.reassemble_pass();
        assert_eq!(st.current, reduct);
    }

    #[test]
    fn agrees_with_engine_on_table_one() {
        let t = parse_term("(\\x.\\y.x y y)(\\z.z)(\\w.w)").unwrap();
        let engine = normalize(&t, Strategy::Leftmost, 100).unwrap();
        let MrOutcome::Normal(run) = mr_normalize(&encode_theta(&t), 100).unwrap() else {
            panic!()
        };
        assert_eq!(run.output, encode_theta(engine.term()));
        assert_eq!(run.iterations.len(), engine.trace().step_count());
    }

    #[test]
    fn substitution_matches_engine_with_nested_binders() {
        let f = parse_term("\\x.\\y.\\z.x (z y x) (\\w.x w)").unwrap();
        let a = parse_term("\\q.q q").unwrap();
        let mut st = MachineRState {
            functional: encode_theta(&f).0,
            argument: encode_theta(&a).0,
            ..MachineRState::default()
        };
        st.substitute_pass().unwrap();
        let expect = substitute_top(f.abs_body().unwrap(), &a);
        assert_eq!(ThetaString(st.reduct.clone()), encode_theta(&expect));
    }

    #[test]
    fn free_variables_copied_verbatim() {
        let t = parse_term("(\\x.x c x)(\\y.y c)").unwrap();
        let engine = normalize(&t, Strategy::Leftmost, 100).unwrap();
        let MrOutcome::Normal(run) = mr_normalize(&encode_theta(&t), 100).unwrap() else {
            panic!()
        };
        assert_eq!(run.output, encode_theta(engine.term()));
    }

    #[test]
    fn omega_exhausts_fuel() {
        let omega = parse_term("(\\x.x x)(\\x.x x)").unwrap();
        let r = mr_normalize(&encode_theta(&omega), 25).unwrap();
        assert!(matches!(r, MrOutcome::FuelExhausted(ref run) if run.iterations.len() == 25));
    }

    #[test]
    fn exact_fuel_still_reports_normal() {
        let r = mr_normalize(&th("@λ▶0λ▶0"), 1).unwrap();
        assert!(matches!(r, MrOutcome::Normal(_)));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(
            mr_normalize(&th("@λ▶0"), 5),
            Err(MrError::Malformed(_))
        ));
    }

    #[test]
    fn counter_arithmetic() {
        let mut c = vec![ThetaSymbol::Zero];
        for n in 1..40 {
            counter_increment(&mut c);
            assert_eq!(counter_value(&c), n);
            let mut expect = Vec::new();
            crate::theta::push_binary(&mut expect, n);
            assert_eq!(c, expect);
        }
        for n in (0..39).rev() {
            counter_decrement(&mut c);
            assert_eq!(counter_value(&c), n);
            let mut expect = Vec::new();
            crate::theta::push_binary(&mut expect, n);
            assert_eq!(c, expect);
        }
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        let recs = [IterationRecord {
            tl_before: 7,
            tl_after: 3,
            ops: 50,
        }];
        write_iterations_csv(&recs, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iteration,tl_before,tl_after,ops\n1,7,3,50\n"
        );
    }
}
