use anyhow::{Context, Result};
use laa_core::attack::{
    attack_demand_report, critical_devices_cp, critical_devices_search, critical_devices_zip, solve_zp_under_attack,
    voltage_under_attack_cp, AttackSpec,
};
use laa_core::loads::with_model;
use laa_core::{
    solve_ac_bfs, solve_iter_zip, solve_ldf_cp, solve_zp_closed_form, sweep_critical, AttackModel, Engine, LoadModel,
    LoadSpec, Scenario, VoltageSolution,
};
use serde_json::json;

use crate::args::{Command, Common, ModelArg, SolverArg};
use crate::output::{Plot, Report};

pub fn run(common: &Common, command: &Command) -> Result<Report> {
    let scenario = common.scenario().load()?;
    match command {
        Command::Solve { solver } => solve(&scenario, *solver),
        Command::Attack {
            attack_bus,
            device,
            count,
            solver,
        } => attack(&scenario, common, *attack_bus, device, *count, *solver),
        Command::Critical {
            attack_bus,
            device,
            search,
        } => critical(&scenario, common.model, *attack_bus, device, *search),
        Command::Sweep { buses, devices, models } => sweep(&scenario, buses, devices, models),
        Command::Demand { buses, device, count } => demand(&scenario, buses, device, *count),
        Command::Validate => validate(&scenario, common),
    }
}

fn solution_summary(s: &VoltageSolution) -> serde_json::Value {
    let (bus, v) = s.min();
    json!({
        "solver": s.solver.as_str(),
        "iterations": s.iterations,
        "converged": s.converged,
        "max_mismatch": s.max_mismatch,
        "min_bus": bus,
        "min_v": v,
    })
}

fn solve(sc: &Scenario, solver: SolverArg) -> Result<Report> {
    let net = &sc.network;
    let opts = sc.config.solver_options();
    let sol = match solver {
        SolverArg::Ac => solve_ac_bfs(net, &sc.loads, &opts)?,
        SolverArg::Ldf => solve_ldf_cp(net, &sc.loads, opts.source_v)?,
        SolverArg::Iter => solve_iter_zip(net, &sc.loads, &opts, Engine::Ldf)?,
        SolverArg::Zp => solve_zp_closed_form(net, &sc.loads, opts.source_v)?,
    };
    let mut report = Report::new("solve", &["bus", "v_pu", "u_pu"]);
    for (i, (v, u)) in sol.v.iter().zip(&sol.u).enumerate() {
        report.row([(i + 1).to_string(), v.to_string(), u.to_string()]);
    }
    report.summary = json!({ "solution": solution_summary(&sol) });
    report.plot = Some(Plot::single("v", &sol.v));
    Ok(report)
}

fn attack(sc: &Scenario, common: &Common, bus: usize, device: &str, count: u64, solver: SolverArg) -> Result<Report> {
    let net = &sc.network;
    let opts = sc.config.solver_options();
    let dev = sc.device(device)?;
    let zip = sc.catalog.require_load_model(&common.zip_set)?;
    let cp_loads = with_model(&sc.loads, LoadModel::ConstantPower);
    let zip_loads = with_model(&sc.loads, LoadModel::Zip(zip));
    let cp_attack = AttackSpec::new(net, bus, dev.clone(), count, AttackModel::ConstantPower)?;
    let zip_attack = AttackSpec::new(net, bus, dev, count, AttackModel::Zip)?;
    let with_attack = |loads: &[LoadSpec], a: &AttackSpec| {
        let mut all = loads.to_vec();
        all.push(a.injected_load(&net.bases()));
        all
    };
    let (cp_base, cp_hit, zip_base, zip_hit) = match solver {
        SolverArg::Ac | SolverArg::Iter => (
            solve_ac_bfs(net, &cp_loads, &opts)?,
            solve_ac_bfs(net, &with_attack(&cp_loads, &cp_attack), &opts)?,
            solve_ac_bfs(net, &zip_loads, &opts)?,
            solve_ac_bfs(net, &with_attack(&zip_loads, &zip_attack), &opts)?,
        ),
        SolverArg::Ldf | SolverArg::Zp => (
            solve_ldf_cp(net, &cp_loads, opts.source_v)?,
            voltage_under_attack_cp(net, &cp_loads, &cp_attack, opts.source_v)?,
            solve_zp_closed_form(net, &zip_loads, opts.source_v)?,
            solve_zp_under_attack(net, &zip_loads, &zip_attack, opts.source_v)?,
        ),
    };
    let mut report = Report::new(
        "attack",
        &["bus", "v_base_cp", "v_attack_cp", "v_base_zip", "v_attack_zip"],
    );
    for i in 0..net.n_buses() {
        report.row([
            (i + 1).to_string(),
            cp_base.v[i].to_string(),
            cp_hit.v[i].to_string(),
            zip_base.v[i].to_string(),
            zip_hit.v[i].to_string(),
        ]);
    }
    report.summary = json!({
        "attack_bus": bus,
        "device": device,
        "count": count,
        "attacked_bus_v_cp": cp_hit.voltage(bus),
        "attacked_bus_v_zip": zip_hit.voltage(bus),
        "cp": solution_summary(&cp_hit),
        "zip": solution_summary(&zip_hit),
    });
    report.plot = Some(Plot {
        series: vec![
            ("no attack, CP".into(), cp_base.v),
            ("attack, CP".into(), cp_hit.v),
            ("no attack, ZIP".into(), zip_base.v),
            ("attack, ZIP".into(), zip_hit.v),
        ],
    });
    Ok(report)
}

fn critical(sc: &Scenario, model: ModelArg, bus: usize, device: &str, search: bool) -> Result<Report> {
    let net = &sc.network;
    let dev = sc.device(device)?;
    let (v_th, v1) = (sc.config.v_th, sc.config.source_v);
    let res = match (model, search) {
        (ModelArg::Cp, false) => critical_devices_cp(net, &sc.loads, bus, &dev, v_th, v1)?,
        (ModelArg::Zip, false) if net.is_leaf(bus)? => critical_devices_zip(net, &sc.loads, bus, &dev, v_th, v1)?,
        (m, _) => critical_devices_search(net, &sc.loads, bus, &dev, v_th, m.into(), v1)?,
    };
    let bases = net.bases();
    let mut report = Report::new(
        "critical",
        &[
            "bus",
            "device",
            "model",
            "method",
            "p_attack_kw",
            "q_attack_kvar",
            "device_count",
            "attacked_bus_v",
        ],
    );
    report.row([
        bus.to_string(),
        device.to_string(),
        res.model.tag().to_string(),
        format!("{:?}", res.method),
        res.p_attack_kw(&bases).to_string(),
        res.q_attack_kvar(&bases).to_string(),
        res.device_count.to_string(),
        res.voltages.voltage(bus).to_string(),
    ]);
    report.summary = json!({
        "bus": bus,
        "device": device,
        "model": res.model.tag(),
        "method": format!("{:?}", res.method),
        "device_count": res.device_count,
        "threshold": res.threshold,
        "solution": solution_summary(&res.voltages),
    });
    report.plot = Some(Plot::single("critical point", &res.voltages.v));
    Ok(report)
}

fn sweep(sc: &Scenario, buses: &[usize], devices: &[String], models: &[ModelArg]) -> Result<Report> {
    let net = &sc.network;
    let buses = if buses.is_empty() { net.leaves() } else { buses.to_vec() };
    let devices = if devices.is_empty() {
        sc.devices()?
    } else {
        devices
            .iter()
            .map(|d| sc.device(d))
            .collect::<laa_core::Result<Vec<_>>>()?
    };
    let models: Vec<AttackModel> = models.iter().map(|&m| m.into()).collect();
    let rows = sweep_critical(
        net,
        &sc.loads,
        &buses,
        &devices,
        sc.config.v_th,
        &models,
        sc.config.source_v,
    );
    let bases = net.bases();
    let mut report = Report::new(
        "sweep",
        &[
            "bus",
            "device",
            "model",
            "method",
            "p_attack_kw",
            "device_count",
            "error",
        ],
    );
    let mut errors = Vec::new();
    for r in &rows {
        match &r.outcome {
            Ok(res) => report.row([
                r.bus.to_string(),
                r.device.clone(),
                r.model.tag().to_string(),
                format!("{:?}", res.method),
                res.p_attack_kw(&bases).to_string(),
                res.device_count.to_string(),
                String::new(),
            ]),
            Err(e) => {
                errors.push(json!({ "bus": r.bus, "device": r.device, "model": r.model.tag(), "kind": e.kind(), "message": e.to_string() }));
                report.row([
                    r.bus.to_string(),
                    r.device.clone(),
                    r.model.tag().to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.kind().to_string(),
                ]);
            }
        }
    }
    report.summary = json!({
        "cells": rows.len(),
        "threshold": sc.config.v_th,
        "errors": errors,
    });
    if let Some(first) = rows.iter().find_map(|r| r.error()) {
        report.failure = Some(first.clone());
    }
    Ok(report)
}

fn demand(sc: &Scenario, buses: &[usize], device: &str, count: u64) -> Result<Report> {
    let net = &sc.network;
    let opts = sc.config.solver_options();
    let dev = sc.device(device)?;
    let mut report = Report::new(
        "demand",
        &[
            "bus",
            "device",
            "count",
            "additional_p_kw",
            "additional_q_kvar",
            "attacked_bus_v",
        ],
    );
    let mut cells = Vec::new();
    for &bus in buses {
        let attack = AttackSpec::new(net, bus, dev.clone(), count, AttackModel::Zip)?;
        let r = attack_demand_report(net, &sc.loads, &attack, &opts)?;
        report.row([
            bus.to_string(),
            device.to_string(),
            count.to_string(),
            r.additional_p_kw.to_string(),
            r.additional_q_kvar.to_string(),
            r.attacked_bus_voltage.to_string(),
        ]);
        cells.push(json!({
            "bus": bus,
            "additional_p_kw": r.additional_p_kw,
            "additional_q_kvar": r.additional_q_kvar,
            "solution": solution_summary(&r.solution),
        }));
    }
    report.summary = json!({ "device": device, "count": count, "attacks": cells });
    Ok(report)
}

fn validate(sc: &Scenario, common: &Common) -> Result<Report> {
    let net = &sc.network;
    let opts = sc.config.solver_options();
    let zip = sc.catalog.require_load_model(&common.zip_set)?;
    let zip_loads = with_model(&sc.loads, LoadModel::Zip(zip));
    let cp_loads = with_model(&sc.loads, LoadModel::ConstantPower);
    let ac_zip = solve_ac_bfs(net, &zip_loads, &opts).context("AC sweep with ZIP loads")?;
    let zp = solve_zp_closed_form(net, &zip_loads, opts.source_v)?;
    let iter_ldf = solve_iter_zip(net, &zip_loads, &opts, Engine::Ldf)?;
    let ac_cp = solve_ac_bfs(net, &cp_loads, &opts)?;
    let ldf = solve_ldf_cp(net, &cp_loads, opts.source_v)?;
    let mut report = Report::new(
        "validate",
        &[
            "bus",
            "v_ac_zip",
            "v_zp_closed",
            "err_pct_zp",
            "v_ac_cp",
            "v_ldf_cp",
            "err_pct_ldf",
        ],
    );
    for i in 0..net.n_buses() {
        let e_zp = (ac_zip.v[i] - zp.v[i]).abs() / ac_zip.v[i] * 100.0;
        let e_ldf = (ac_cp.v[i] - ldf.v[i]).abs() / ac_cp.v[i] * 100.0;
        report.row([
            (i + 1).to_string(),
            ac_zip.v[i].to_string(),
            zp.v[i].to_string(),
            e_zp.to_string(),
            ac_cp.v[i].to_string(),
            ldf.v[i].to_string(),
            e_ldf.to_string(),
        ]);
    }
    report.summary = json!({
        "max_relative_error_pct_zp_vs_ac": zp.max_relative_error_pct(&ac_zip),
        "max_relative_error_pct_ldf_vs_ac": ldf.max_relative_error_pct(&ac_cp),
        "max_abs_diff_zp_vs_iter_ldf": zp.max_abs_diff(&iter_ldf),
        "ac_zip": solution_summary(&ac_zip),
        "ac_cp": solution_summary(&ac_cp),
    });
    report.plot = Some(Plot {
        series: vec![("AC, ZIP".into(), ac_zip.v), ("ZP closed form".into(), zp.v)],
    });
    Ok(report)
}
