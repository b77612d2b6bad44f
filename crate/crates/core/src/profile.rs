//! Structured profile fields drawn next to the text.
//!
//! Four fields are used: age, country, marriage and gender. Age and country
//! are drawn as-is; the two categorical fields become one-character initials.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marriage {
    Married,
    Divorced,
    Single,
    Separated,
    Widowed,
    Nan,
    #[default]
    Empty,
}

impl Marriage {
    pub const ALL: [Marriage; 7] = [
        Marriage::Married,
        Marriage::Divorced,
        Marriage::Single,
        Marriage::Separated,
        Marriage::Widowed,
        Marriage::Nan,
        Marriage::Empty,
    ];

    pub fn token(self) -> Option<&'static str> {
        match self {
            Marriage::Married => Some("m"),
            Marriage::Divorced => Some("d"),
            Marriage::Single => Some("s"),
            Marriage::Separated => Some("p"),
            Marriage::Widowed => Some("w"),
            Marriage::Nan => Some("0"),
            Marriage::Empty => None,
        }
    }
}

impl FromStr for Marriage {
    type Err = Error;

    fn from_str(raw: &str) -> Result<Self> {
        Ok(match raw.trim().to_ascii_lowercase().as_str() {
            "" => Marriage::Empty,
            "married" => Marriage::Married,
            "divorced" | "divorce" => Marriage::Divorced,
            "single" => Marriage::Single,
            "separated" => Marriage::Separated,
            "widowed" | "widow" => Marriage::Widowed,
            "nan" => Marriage::Nan,
            _ => {
                return Err(Error::Normalization {
                    field: "marriage",
                    value: raw.to_string(),
                })
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Other,
    Nan,
    #[default]
    Empty,
}

impl Gender {
    pub const ALL: [Gender; 5] = [
        Gender::Female,
        Gender::Male,
        Gender::Other,
        Gender::Nan,
        Gender::Empty,
    ];

    pub fn token(self) -> Option<&'static str> {
        match self {
            Gender::Female => Some("f"),
            Gender::Male => Some("m"),
            Gender::Other => Some("o"),
            Gender::Nan => Some("N"),
            Gender::Empty => None,
        }
    }
}

impl FromStr for Gender {
    type Err = Error;

    // Single-letter codes are accepted too; HappyDB's demographics use them.
    fn from_str(raw: &str) -> Result<Self> {
        Ok(match raw.trim().to_ascii_lowercase().as_str() {
            "" => Gender::Empty,
            "female" | "f" => Gender::Female,
            "male" | "m" => Gender::Male,
            "other" | "o" => Gender::Other,
            "nan" => Gender::Nan,
            _ => {
                return Err(Error::Normalization {
                    field: "gender",
                    value: raw.to_string(),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub age: Option<String>,
    pub country: Option<String>,
    pub marriage: Marriage,
    pub gender: Gender,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileField {
    Age,
    Country,
    Marriage,
    Gender,
}

impl FromStr for ProfileField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "age" => Ok(ProfileField::Age),
            "country" => Ok(ProfileField::Country),
            "marriage" | "married" | "marital" => Ok(ProfileField::Marriage),
            "gender" => Ok(ProfileField::Gender),
            other => Err(Error::Config(format!("unknown profile field {other:?}"))),
        }
    }
}

impl ProfileRecord {
    /// Sets one field from raw text. Blank age or country clears the field.
    pub fn set(&mut self, field: ProfileField, raw: &str) -> Result<()> {
        let trimmed = raw.trim();
        let text = (!trimmed.is_empty()).then(|| trimmed.to_string());
        match field {
            ProfileField::Age => self.age = text,
            ProfileField::Country => self.country = text,
            ProfileField::Marriage => self.marriage = raw.parse()?,
            ProfileField::Gender => self.gender = raw.parse()?,
        }
        Ok(())
    }

    /// Parses `age=36,country=IND,marriage=married,gender=male`.
    pub fn parse_assignments(spec: &str) -> Result<Self> {
        let mut record = ProfileRecord::default();
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected field=value, got {part:?}")))?;
            record.set(key.parse()?, value)?;
        }
        Ok(record)
    }
}

/// Tokens in the order age, country, marriage, gender. Empty fields are
/// skipped, so later tokens shift left.
pub fn encode_profile(record: &ProfileRecord) -> Vec<String> {
    let mut tokens = Vec::with_capacity(4);
    if let Some(age) = record
        .age
        .as_deref()
        .map(str::trim)
        .filter(|a| !a.is_empty())
    {
        tokens.push(age_token(age));
    }
    if let Some(country) = record
        .country
        .as_deref()
        .map(str::trim)
        .filter(|c| !c.is_empty())
    {
        tokens.push(country.to_string());
    }
    tokens.extend(record.marriage.token().map(String::from));
    tokens.extend(record.gender.token().map(String::from));
    tokens
}

/// Whole-number ages (including "36.0") become their digits; anything else
/// passes through verbatim.
fn age_token(age: &str) -> String {
    match age.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 1e9 => {
            format!("{}", v as u64)
        }
        _ => age.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn married_male_example() {
        let record = ProfileRecord {
            age: Some("36".into()),
            country: Some("IND".into()),
            marriage: Marriage::Married,
            gender: Gender::Male,
        };
        assert_eq!(encode_profile(&record), vec!["36", "IND", "m", "m"]);
    }

    #[test]
    fn nan_categoricals_only() {
        let record = ProfileRecord {
            marriage: Marriage::Nan,
            gender: Gender::Nan,
            ..ProfileRecord::default()
        };
        assert_eq!(encode_profile(&record), vec!["0", "N"]);
    }

    #[test]
    fn empty_record() {
        assert!(encode_profile(&ProfileRecord::default()).is_empty());
    }

    #[test]
    fn normalization_is_lenient_on_case_and_space() {
        assert_eq!(" Widow ".parse::<Marriage>().unwrap(), Marriage::Widowed);
        assert_eq!("DIVORCED".parse::<Marriage>().unwrap(), Marriage::Divorced);
        assert_eq!("NaN".parse::<Gender>().unwrap(), Gender::Nan);
        assert_eq!("m".parse::<Gender>().unwrap(), Gender::Male);
    }

    #[test]
    fn unknown_categorical_names_field() {
        match "engaged".parse::<Marriage>() {
            Err(Error::Normalization { field, value }) => {
                assert_eq!(field, "marriage");
                assert_eq!(value, "engaged");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            "x".parse::<Gender>(),
            Err(Error::Normalization {
                field: "gender",
                ..
            })
        ));
    }

    #[test]
    fn age_forms() {
        assert_eq!(age_token("36.0"), "36");
        assert_eq!(age_token("prefer not to say"), "prefer not to say");
        assert_eq!(age_token("-3"), "-3");
    }

    #[test]
    fn assignments() {
        let record =
            ProfileRecord::parse_assignments("age=36,country=IND,marriage=married,gender=male")
                .unwrap();
        assert_eq!(encode_profile(&record), vec!["36", "IND", "m", "m"]);
        let partial = ProfileRecord::parse_assignments("gender=f, country= USA").unwrap();
        assert_eq!(encode_profile(&partial), vec!["USA", "f"]);
        assert!(ProfileRecord::parse_assignments("parenthood=y").is_err());
        assert!(ProfileRecord::parse_assignments("age").is_err());
    }

    #[test]
    fn output_is_ordered_and_bounded() {
        for m in Marriage::ALL {
            for g in Gender::ALL {
                let record = ProfileRecord {
                    age: Some("20".into()),
                    country: Some("USA".into()),
                    marriage: m,
                    gender: g,
                };
                let tokens = encode_profile(&record);
                assert!(tokens.len() <= 4);
                assert_eq!(&tokens[..2], ["20", "USA"]);
            }
        }
    }
}
