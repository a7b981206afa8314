//! Helpers shared by integration test targets.

#![allow(dead_code)]

/// Brute-force reading of the numeric tokens: walk every character offset,
/// grow each maximal run by hand, then split it by the separator rules.
pub mod oracle {
    #[derive(Debug, Clone, Copy)]
    pub struct Tok {
        pub value: f64,
        pub year: bool,
    }

    fn interpret(run: &[char], out: &mut Vec<Tok>) {
        let commas = run.iter().filter(|&&c| c == ',').count();
        let dots = run.iter().filter(|&&c| c == '.').count();
        if commas > 0 {
            let groups: Vec<Vec<char>> = run.split(|&c| c == ',').map(|g| g.to_vec()).collect();
            let last = groups.len() - 1;
            let mut ok = (1..=3).contains(&groups[0].len()) && groups[0].iter().all(char::is_ascii_digit);
            for (i, g) in groups.iter().enumerate().skip(1) {
                let int_part: Vec<char> = g.iter().take_while(|c| c.is_ascii_digit()).copied().collect();
                let rest = &g[int_part.len()..];
                ok &= int_part.len() == 3;
                if i < last {
                    ok &= rest.is_empty();
                } else {
                    ok &= rest.is_empty() || (rest[0] == '.' && rest.len() > 1 && rest[1..].iter().all(char::is_ascii_digit));
                }
            }
            if ok {
                let s: String = run.iter().filter(|&&c| c != ',').collect();
                out.push(Tok { value: s.parse().unwrap(), year: false });
            } else {
                for g in groups {
                    interpret(&g, out);
                }
            }
        } else if dots > 1 {
            for g in run.split(|&c| c == '.') {
                interpret(g, out);
            }
        } else {
            let s: String = run.iter().collect();
            out.push(Tok { value: s.parse().unwrap(), year: dots == 0 && run.len() == 4 });
        }
    }

    pub fn tokens(text: &str) -> Vec<Tok> {
        let c: Vec<char> = text.chars().collect();
        let is_sep = |x: char| x == ',' || x == '.';
        let mut out = Vec::new();
        for i in 0..c.len() {
            if !c[i].is_ascii_digit() {
                continue;
            }
            let continues = i >= 1 && (c[i - 1].is_ascii_digit() || (i >= 2 && is_sep(c[i - 1]) && c[i - 2].is_ascii_digit()));
            if continues {
                continue;
            }
            let mut j = i;
            while j < c.len() {
                if c[j].is_ascii_digit() || (is_sep(c[j]) && j + 1 < c.len() && c[j + 1].is_ascii_digit() && c[j - 1].is_ascii_digit()) {
                    j += 1;
                } else {
                    break;
                }
            }
            interpret(&c[i..j], &mut out);
        }
        out
    }

    pub fn contains(text: &str, gold: f64, year_rule: bool) -> bool {
        tokens(text).iter().any(|t| (!year_rule || t.year) && (t.value - gold).abs() < 1e-9)
    }
}
