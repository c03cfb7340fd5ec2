//! Generic incomes with four items and three agents where no CE exists.

use cefai_core::cefai::select_range;
use cefai_core::{
    ce_exists, is_generic, make_preference, random_preference, rat, solve, stratified_incomes,
    Bundle, Error, IncomeVector, PreferenceOrder,
};

/// Best-first list of bundles, each written as its item digits.
fn ranking(best_first: &[&str]) -> PreferenceOrder {
    let worst_first: Vec<Bundle> = best_first
        .iter()
        .rev()
        .map(|s| Bundle::from_items(s.chars().map(|c| c.to_digit(10).unwrap() as usize)))
        .collect();
    make_preference(4, &worst_first).unwrap()
}

fn hand_built() -> (Vec<PreferenceOrder>, IncomeVector) {
    let profile = vec![
        ranking(&[
            "0123", "012", "123", "023", "12", "013", "03", "02", "01", "13", "23", "3", "0", "1",
            "2", "",
        ]),
        ranking(&[
            "0123", "023", "123", "013", "03", "012", "12", "02", "23", "2", "13", "3", "01", "1",
            "0", "",
        ]),
        ranking(&[
            "0123", "023", "123", "012", "23", "12", "02", "013", "13", "03", "01", "3", "0", "1",
            "2", "",
        ]),
    ];
    let incomes =
        IncomeVector::new(vec![rat(1803, 5000), rat(1401, 2000), rat(281, 1000)]).unwrap();
    (profile, incomes)
}

#[test]
fn hand_built_profile_has_no_ce() {
    let (profile, incomes) = hand_built();
    assert!(is_generic(&incomes, 4).unwrap());
    assert_eq!(
        select_range(4, &incomes).unwrap().to_string(),
        "Alg3-Range3"
    );
    assert_eq!(ce_exists(&profile, &incomes).unwrap(), None);
    assert_eq!(solve(&profile, &incomes).unwrap_err(), Error::NoValidSpe);
}

#[test]
fn nearby_incomes_have_no_ce() {
    let (profile, incomes) = hand_built();
    let step = rat(1, 2000);
    for da in -2i64..=2 {
        for db in -2i64..=2 {
            let t = IncomeVector::new(vec![
                incomes.get(0) + &step * rat(db, 1),
                incomes.get(1) + &step * rat(da, 1),
                incomes.get(2).clone(),
            ])
            .unwrap();
            if is_generic(&t, 4).unwrap() {
                assert_eq!(ce_exists(&profile, &t).unwrap(), None, "{t:?}");
            }
        }
    }
}

#[test]
fn sampled_profile_has_no_ce() {
    let profile: Vec<PreferenceOrder> = (370..373)
        .map(|s| random_preference(4, s).unwrap())
        .collect();
    let incomes = stratified_incomes(4, 3, "Range6", 5, 100)
        .unwrap()
        .swap_remove(37);
    assert_eq!(
        incomes,
        IncomeVector::new(vec![rat(3651, 5000), rat(349, 10000), rat(7129, 10000)]).unwrap()
    );
    assert_eq!(ce_exists(&profile, &incomes).unwrap(), None);
    assert_eq!(solve(&profile, &incomes).unwrap_err(), Error::NoValidSpe);
}
