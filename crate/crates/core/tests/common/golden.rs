//! The hand-scored evaluator cases.

pub struct GoldenCase {
    pub name: String,
    pub candidate: String,
    pub gold: String,
    pub expect: Vec<String>,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let text = include_str!("../fixtures/eval_golden.txt");
    let mut out: Vec<GoldenCase> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap();
        let rest = rest.trim().to_string();
        match key {
            "case" => out.push(GoldenCase { name: rest, candidate: String::new(), gold: String::new(), expect: Vec::new() }),
            "candidate" => out.last_mut().unwrap().candidate = rest,
            "gold" => out.last_mut().unwrap().gold = rest,
            "expect" => out.last_mut().unwrap().expect = rest.split_whitespace().map(String::from).collect(),
            _ => panic!("bad fixture line {line}"),
        }
    }
    out
}
