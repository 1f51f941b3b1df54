#!/usr/bin/env python3
"""Generates the scripted-backend scenario corpus and the 30-task suite.

Scenario files are committed; rerun this script only when the scenario design
changes:  python3 tools/gen_scenarios.py
"""

import json
import os
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = ROOT / "scenarios"
SUITE_DIR = ROOT / "suites"

ROLES = ["builder", "demand", "modifier", "runner", "analyst"]


def envelope(action, params, reason, summary):
    return {"action": action, "params": params, "reason": reason,
            "decision": {"summary": summary}}


def plan(steps, reason, summary):
    doc_steps = []
    for i, (role, prompt, goal) in enumerate(steps, 1):
        prompts = {r: "" for r in ROLES}
        prompts[role] = prompt
        doc_steps.append({"step_id": i, "goal": goal, "agent_prompts": prompts})
    return {"status": "ok", "version": "v1", "plan": doc_steps,
            "reason": reason, "decision": {"summary": summary}}


def build_env(city, miles, volume):
    return envelope("BUILD_NET",
                    {"type": "build_from_realworld", "city_name": city,
                     "distance_miles": miles, "volume": volume},
                    f"Construct the {city} network at {miles} miles radius.",
                    "build network")


def random_demand_env(flows):
    return envelope("GEN_DEMAND", {"type": "build_routes_random", "flows": flows},
                    f"Spread {flows} random trips across the network.", "random demand")


def od_demand_env(from_edge, to_edge, vph):
    return envelope("GEN_DEMAND",
                    {"type": "generate_flow_route", "from_edge": from_edge,
                     "to_edge": to_edge, "vph": vph},
                    f"Flow {from_edge} -> {to_edge} at {vph} vph.", "od demand")


def modify_env(params, note):
    return envelope("MODIFY", params, note, "modify network")


def run_env(steps=3600):
    return envelope("RUN", {"steps": steps, "gui": False},
                    f"Headless run for {steps} steps.", "run simulation")


def analyze_env(metric):
    return envelope("ANALYZE", {"metric": metric},
                    f"Aggregate {metric} from tripinfo.", "analyze results")


def scenario(scenario_id, roles, token_model="char_proportional", latency=None):
    body = {"scenario_id": scenario_id, "token_model": token_model,
            "latency": latency or {"per_call_ms": 120, "per_token_out_ms": 2,
                                   "per_kchar_in_ms": 100},
            "roles": {}}
    for role, entries in roles.items():
        out = []
        for e in entries:
            if isinstance(e, dict) and "text" in e and "json" not in e:
                out.append(e)
            elif isinstance(e, dict) and "json" in e:
                out.append(e)
            else:
                out.append({"json": e})
        body["roles"][role] = out
    return body


def write_scenario(body):
    SCENARIO_DIR.mkdir(parents=True, exist_ok=True)
    path = SCENARIO_DIR / f"{body['scenario_id']}.json"
    with open(path, "w") as f:
        json.dump(body, f, indent=1)
        f.write("\n")


# ---------------------------------------------------------------------------
# plan-step helpers
# ---------------------------------------------------------------------------

def builder_step(city, miles, volume):
    return ("builder", f"Build a network for {city} with {miles} miles radius and {volume} volume.",
            "construct network")


def random_demand_step(flows):
    return ("demand", f"Generate {flows} random flows for the network.", "generate demand")


def od_demand_step(frm, to, vph):
    return ("demand", f"Generate flow from {frm} to {to} with {vph} vph.", "generate demand")


def modifier_step(text):
    return ("modifier", text, "modify network")


def runner_step(steps=3600):
    return ("runner", f"Run simulation for {steps} steps.", "run simulation")


def analyst_step(metric):
    return ("analyst", f"Analyze the simulation results focusing on {metric}.", "analyze results")


def mono_success(city, miles, volume, demand, steps, metric, modify=None):
    seq = [build_env(city, miles, volume)]
    if modify is not None:
        seq.append(modify)
    seq.append(demand)
    seq.append(run_env(steps))
    seq.append(analyze_env(metric))
    return seq


STOP = envelope("STOP", {}, "Goal not reachable; stopping.", "stop")


# ---------------------------------------------------------------------------
# the 30-task suite
# ---------------------------------------------------------------------------

tasks = []


def add_task(task_id, level, objective, scenario_body, constraints=None,
             expected_modification=False, fault_injected=False):
    tasks.append({"task_id": task_id, "level": level, "objective": objective,
                  "constraints": constraints or [],
                  "scenario_id": scenario_body["scenario_id"],
                  "expected_modification": expected_modification,
                  "fault_injected": fault_injected})
    write_scenario(scenario_body)


L1 = [
    ("l1_01", "Troy", 0.5, 1000, "travel_time"),
    ("l1_02", "Albany", 0.31, 800, "mean_speed"),
    ("l1_03", "Utica", 0.62, 1200, "waiting_time"),
    ("l1_04", "Ithaca", 0.8, 600, "co2"),
    ("l1_05", "Geneva", 0.45, 1500, "all"),
    ("l1_06", "Auburn", 0.72, 900, "travel_time"),
    ("l1_07", "Oswego", 0.55, 700, "mean_speed"),
    ("l1_08", "Elmira", 0.38, 1100, "all"),
    ("l1_09", "Cortland", 0.66, 1300, "travel_time"),
]

for task_id, city, miles, volume, metric in L1:
    objective = (f"Simulate medium traffic in {city} within a {miles} mile radius, "
                 f"about {volume} trips, and report {metric}.")
    body = scenario(task_id, {
        "planner": [plan([builder_step(city, miles, volume),
                          random_demand_step(volume),
                          runner_step(),
                          analyst_step(metric)],
                         "standard flow", "build, demand, run, analyze")],
        "builder": [build_env(city, miles, volume)],
        "demand": [random_demand_env(volume)],
        "runner": [run_env()],
        "analyst": [analyze_env(metric)],
        "mono": mono_success(city, miles, volume, random_demand_env(volume), 3600, metric),
    })
    add_task(task_id, "L1", objective, body)

# l1_10: smoke run so short that no vehicle finishes; the zero-vehicle
# warning is benign and the constraint-free run still succeeds.
body = scenario("l1_10", {
    "planner": [plan([builder_step("Batavia", 0.29, 5),
                      random_demand_step(5),
                      runner_step(5),
                      analyst_step("all")],
                     "quick smoke check", "short run")],
    "builder": [build_env("Batavia", 0.29, 5)],
    "demand": [random_demand_env(5)],
    "runner": [run_env(5)],
    "analyst": [analyze_env("all")],
    "mono": mono_success("Batavia", 0.29, 5, random_demand_env(5), 5, "all"),
})
add_task("l1_10", "L1",
         "Quick smoke check for Batavia at 0.29 miles: a handful of trips, "
         "run only 5 steps, report all metrics.", body)


# --- L2: origin-destination demand -----------------------------------------

L2_OK = [
    ("l2_01", "Troy", 800, "travel_time"),
    ("l2_02", "Albany", 400, "mean_speed"),
    ("l2_03", "Utica", 650, "waiting_time"),
    ("l2_06", "Auburn", 550, "co2"),
    ("l2_08", "Elmira", 900, "all"),
    ("l2_09", "Cortland", 600, "travel_time"),
]

for task_id, city, vph, metric in L2_OK:
    objective = (f"In {city} (0.5 mile radius, 1000 volume), send {vph} vph "
                 f"from Main Street to Congress Street and report {metric}.")
    demand_entries = [od_demand_env("Main Street", "Congress Street", vph)]
    if task_id == "l2_09":
        # One garbled completion; the in-role retry straightens it out within
        # the same iteration, so this is not a fault-injection task.
        demand_entries = [
            {"text": "```json\n" + json.dumps(od_demand_env("Main Street", "Congress Street", vph)) + "\n```"},
            od_demand_env("Main Street", "Congress Street", vph),
        ]
    body = scenario(task_id, {
        "planner": [plan([builder_step(city, 0.5, 1000),
                          od_demand_step("Main Street", "Congress Street", vph),
                          runner_step(),
                          analyst_step(metric)],
                         "od flow", "standard od pipeline")],
        "builder": [build_env(city, 0.5, 1000)],
        "demand": demand_entries,
        "runner": [run_env()],
        "analyst": [analyze_env(metric)],
        "mono": mono_success(city, 0.5, 1000,
                             od_demand_env("Main Street", "Congress Street", vph), 3600, metric),
    })
    add_task(task_id, "L2", objective, body)

# l2_04: misspelled street in iteration 1; candidates point at the fix.
city = "Ithaca"
body = scenario("l2_04", {
    "planner": [
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("Main Stret", "Congress Street", 700),
              runner_step(), analyst_step("travel_time")],
             "od flow", "od pipeline"),
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("Main Street", "Congress Street", 700),
              runner_step(), analyst_step("travel_time")],
             "retry with the suggested street name", "repaired od pipeline"),
    ],
    "builder": [build_env(city, 0.5, 1000)] * 2,
    "demand": [od_demand_env("Main Stret", "Congress Street", 700),
               od_demand_env("Main Street", "Congress Street", 700)],
    "runner": [run_env()],
    "analyst": [analyze_env("travel_time")],
    "mono": [build_env(city, 0.5, 1000),
             od_demand_env("Main Stret", "Congress Street", 700),
             STOP],
})
add_task("l2_04", "L2",
         "In Ithaca (0.5 mile radius, 1000 volume), send 700 vph from Main Street "
         "to Congress Street and report travel_time.", body, fault_injected=True)

# l2_05: KPI feedback loop; the first demand is too heavy for the corridor.
city = "Geneva"
body = scenario("l2_05", {
    "planner": [
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("Main Street", "Congress Street", 2400),
              runner_step(), analyst_step("waiting_time")],
             "heavy od flow", "od pipeline"),
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("Main Street", "Congress Street", 600),
              runner_step(), analyst_step("waiting_time")],
             "waiting too high; lower the demand", "lighter od pipeline"),
    ],
    "builder": [build_env(city, 0.5, 1000)] * 2,
    "demand": [od_demand_env("Main Street", "Congress Street", 2400),
               od_demand_env("Main Street", "Congress Street", 600)],
    "runner": [run_env()] * 2,
    "analyst": [analyze_env("waiting_time")] * 2,
    "mono": [build_env(city, 0.5, 1000),
             od_demand_env("Main Street", "Congress Street", 2400),
             run_env(), analyze_env("waiting_time"), STOP],
})
add_task("l2_05", "L2",
         "In Geneva (0.5 mile radius, 1000 volume), route a flow from Main Street "
         "to Congress Street keeping mean waiting time at most 2 seconds; "
         "report waiting_time.", body,
         constraints=["waiting_time<=2"], fault_injected=True)

# l2_07: hallucinated edge id in iteration 1.
city = "Oswego"
body = scenario("l2_07", {
    "planner": [
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("e_n9_9_n9_8", "Congress Street", 500),
              runner_step(), analyst_step("mean_speed")],
             "od flow", "od pipeline"),
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("e_n0_0_n0_1", "Congress Street", 500),
              runner_step(), analyst_step("mean_speed")],
             "use a real edge id", "repaired od pipeline"),
    ],
    "builder": [build_env(city, 0.5, 1000)] * 2,
    "demand": [od_demand_env("e_n9_9_n9_8", "Congress Street", 500),
               od_demand_env("e_n0_0_n0_1", "Congress Street", 500)],
    "runner": [run_env()],
    "analyst": [analyze_env("mean_speed")],
    "mono": [build_env(city, 0.5, 1000),
             od_demand_env("e_n9_9_n9_8", "Congress Street", 500),
             STOP],
})
add_task("l2_07", "L2",
         "In Oswego (0.5 mile radius, 1000 volume), send 500 vph from Main Street "
         "to Congress Street and report mean_speed.", body, fault_injected=True)

# l2_10: two garbled completions in a row burn the in-role retry and the
# iteration; the second round emits clean JSON.
city = "Batavia"
good_l2_10 = od_demand_env("Main Street", "Congress Street", 450)
body = scenario("l2_10", {
    "planner": [
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("Main Street", "Congress Street", 450),
              runner_step(), analyst_step("travel_time")],
             "od flow", "od pipeline"),
        plan([builder_step(city, 0.5, 1000),
              od_demand_step("Main Street", "Congress Street", 450),
              runner_step(), analyst_step("travel_time")],
             "emit one json object only", "repaired od pipeline"),
    ],
    "builder": [build_env(city, 0.5, 1000)] * 2,
    "demand": [
        {"text": "```json\n" + json.dumps(good_l2_10) + "\n```"},
        {"text": "Certainly! Here is the demand definition you asked for."},
        good_l2_10,
    ],
    "runner": [run_env()],
    "analyst": [analyze_env("travel_time")],
    "mono": [build_env(city, 0.5, 1000),
             {"text": "```json\n" + json.dumps(good_l2_10) + "\n```"},
             {"text": "Certainly! Here is the demand definition you asked for."},
             STOP],
})
add_task("l2_10", "L2",
         "In Batavia (0.5 mile radius, 1000 volume), send 450 vph from Main Street "
         "to Congress Street and report travel_time.", body, fault_injected=True)


# --- L3: structural modification tasks --------------------------------------

def l3_remove_scenario(scenario_id, city, removed_edge, vph, metric, fault):
    """Remove an edge; demand either trips over it (fault) or avoids it."""
    good_demand = od_demand_env("Main Street", "Congress Street", vph)
    bad_demand = od_demand_env(removed_edge, "Congress Street", vph)
    remove = modify_env({"op": "remove_edge", "edge_id": removed_edge, "volume": 1000},
                        f"Drop segment {removed_edge} from the grid.")
    plan_good = plan([builder_step(city, 0.5, 1000),
                      modifier_step(f"Remove the edge with ID '{removed_edge}' from the generated network."),
                      od_demand_step("Main Street", "Congress Street", vph),
                      runner_step(), analyst_step(metric)],
                     "modification flow", "remove edge then route around it")
    if fault:
        plan_bad = plan([builder_step(city, 0.5, 1000),
                         modifier_step(f"Remove the edge with ID '{removed_edge}' from the generated network."),
                         od_demand_step(removed_edge, "Congress Street", vph),
                         runner_step(), analyst_step(metric)],
                        "modification flow", "remove edge")
        return scenario(scenario_id, {
            "planner": [plan_bad, plan_good],
            "builder": [build_env(city, 0.5, 1000)] * 2,
            "modifier": [remove] * 2,
            "demand": [bad_demand, good_demand],
            "runner": [run_env()],
            "analyst": [analyze_env(metric)],
            "mono": [build_env(city, 0.5, 1000), remove, bad_demand, STOP],
        })
    return scenario(scenario_id, {
        "planner": [plan_good],
        "builder": [build_env(city, 0.5, 1000)],
        "modifier": [remove],
        "demand": [good_demand],
        "runner": [run_env()],
        "analyst": [analyze_env(metric)],
        "mono": [build_env(city, 0.5, 1000), remove, good_demand, run_env(), analyze_env(metric)],
    })


def l3_tls_scenario(scenario_id, city, tls_id, cycle, metric):
    tls = modify_env({"op": "tls_optimize_and_apply", "tls_id": tls_id, "cycle": cycle},
                     f"Rebalance {tls_id} to a {cycle}s cycle.")
    p = plan([builder_step(city, 0.5, 1000),
              modifier_step(f"Optimize the traffic light '{tls_id}' with a {cycle} second cycle."),
              random_demand_step(1000),
              runner_step(), analyst_step(metric)],
             "tls modification flow", "optimize signal then simulate")
    return scenario(scenario_id, {
        "planner": [p],
        "builder": [build_env(city, 0.5, 1000)],
        "modifier": [tls],
        "demand": [random_demand_env(1000)],
        "runner": [run_env()],
        "analyst": [analyze_env(metric)],
        "mono": [build_env(city, 0.5, 1000), tls, random_demand_env(1000),
                 run_env(), analyze_env(metric)],
    })


def l3_speed_scenario(scenario_id, city, edge_id, vmax, metric):
    setter = modify_env({"op": "edge_set_speed", "edge_id": edge_id, "vmax": vmax},
                        f"Limit {edge_id} to {vmax} m/s.")
    p = plan([builder_step(city, 0.5, 1000),
              modifier_step(f"Modify edge '{edge_id}': set its speed to {vmax} m/s."),
              random_demand_step(1000),
              runner_step(), analyst_step(metric)],
             "speed modification flow", "calm a street then simulate")
    return scenario(scenario_id, {
        "planner": [p],
        "builder": [build_env(city, 0.5, 1000)],
        "modifier": [setter],
        "demand": [random_demand_env(1000)],
        "runner": [run_env()],
        "analyst": [analyze_env(metric)],
        "mono": [build_env(city, 0.5, 1000), setter, random_demand_env(1000),
                 run_env(), analyze_env(metric)],
    })


add_task("l3_01", "L3",
         "In Troy (0.5 mile radius, 1000 volume), remove the edge 'e_n0_2_n0_3' from "
         "the network, then send 700 vph from Main Street to Congress Street and "
         "report travel_time.",
         l3_remove_scenario("l3_01", "Troy", "e_n0_2_n0_3", 700, "travel_time", fault=False),
         expected_modification=True)

add_task("l3_02", "L3",
         "In Albany (0.5 mile radius, 1000 volume), remove the edge 'e_n0_2_n0_3', "
         "then send 650 vph from Main Street to Congress Street and report travel_time.",
         l3_remove_scenario("l3_remove_edge_repair", "Albany", "e_n0_2_n0_3", 650,
                            "travel_time", fault=True),
         expected_modification=True, fault_injected=True)

add_task("l3_03", "L3",
         "Optimize the traffic light 'tls_n1_1' in Utica (0.5 mile radius, 1000 volume) "
         "with a 60 second cycle, then simulate 1000 random trips and report waiting_time.",
         l3_tls_scenario("l3_03", "Utica", "tls_n1_1", 60.0, "waiting_time"),
         expected_modification=True)

add_task("l3_04", "L3",
         "Modify edge 'e_n1_1_n1_2' in Ithaca (0.5 mile radius, 1000 volume): set its "
         "speed to 5 m/s, then simulate 1000 random trips and report mean_speed.",
         l3_speed_scenario("l3_04", "Ithaca", "e_n1_1_n1_2", 5.0, "mean_speed"),
         expected_modification=True)

add_task("l3_05", "L3",
         "In Geneva (0.5 mile radius, 1000 volume), remove the edge 'e_n2_2_n2_3', then "
         "send 500 vph from Main Street to Congress Street and report co2.",
         l3_remove_scenario("l3_05", "Geneva", "e_n2_2_n2_3", 500, "co2", fault=False),
         expected_modification=True)

add_task("l3_06", "L3",
         "In Auburn (0.5 mile radius, 1000 volume), remove the edge 'e_n0_3_n0_4', then "
         "send 600 vph from Main Street to Congress Street and report waiting_time.",
         l3_remove_scenario("l3_06", "Auburn", "e_n0_3_n0_4", 600, "waiting_time", fault=True),
         expected_modification=True, fault_injected=True)

add_task("l3_07", "L3",
         "Optimize the traffic light 'tls_n2_2' in Oswego (0.5 mile radius, 1000 volume) "
         "with a 90 second cycle, then simulate 1000 random trips and report all metrics.",
         l3_tls_scenario("l3_07", "Oswego", "tls_n2_2", 90.0, "all"),
         expected_modification=True)

# l3_08: speed change overshoots; KPI feedback pulls it back.
city = "Elmira"
slow = modify_env({"op": "edge_set_speed", "edge_id": "e_n0_1_n0_0", "vmax": 2.0},
                  "Calm the connector hard.")
mild = modify_env({"op": "edge_set_speed", "edge_id": "e_n0_1_n0_0", "vmax": 10.0},
                  "Mean speed fell below target; relax the limit.")
od_l3_08 = od_demand_env("Main Street", "Congress Street", 600)
body = scenario("l3_08", {
    "planner": [
        plan([builder_step(city, 0.5, 1000),
              modifier_step("Modify edge 'e_n0_1_n0_0': set its speed to 2 m/s."),
              od_demand_step("Main Street", "Congress Street", 600),
              runner_step(), analyst_step("mean_speed")],
             "aggressive calming", "calm then measure"),
        plan([builder_step(city, 0.5, 1000),
              modifier_step("Modify edge 'e_n0_1_n0_0': set its speed to 10 m/s."),
              od_demand_step("Main Street", "Congress Street", 600),
              runner_step(), analyst_step("mean_speed")],
             "mean speed too low; raise the limit", "recalibrated calming"),
    ],
    "builder": [build_env(city, 0.5, 1000)] * 2,
    "modifier": [slow, mild],
    "demand": [od_l3_08] * 2,
    "runner": [run_env()] * 2,
    "analyst": [analyze_env("mean_speed")] * 2,
    "mono": [build_env(city, 0.5, 1000), slow, od_l3_08,
             run_env(), analyze_env("mean_speed"), STOP],
})
add_task("l3_08", "L3",
         "Modify the speed limit on the Main Street connector in Elmira (0.5 mile "
         "radius, 1000 volume) to calm traffic, but keep mean_speed at least 8 m/s "
         "on the Main Street to Congress Street flow (600 vph). Report mean_speed.",
         body, constraints=["mean_speed>=8"],
         expected_modification=True, fault_injected=True)

add_task("l3_09", "L3",
         "In Cortland (0.5 mile radius, 1000 volume), remove the edge 'e_n3_1_n3_2', "
         "then send 800 vph from Main Street to Congress Street and report mean_speed.",
         l3_remove_scenario("l3_09", "Cortland", "e_n3_1_n3_2", 800, "mean_speed", fault=False),
         expected_modification=True)

add_task("l3_10", "L3",
         "Modify edge 'e_n2_0_n2_1' in Batavia (0.5 mile radius, 1000 volume): set its "
         "speed to 8 m/s, then simulate 1000 random trips and report travel_time.",
         l3_speed_scenario("l3_10", "Batavia", "e_n2_0_n2_1", 8.0, "travel_time"),
         expected_modification=True)


# ---------------------------------------------------------------------------
# standalone test fixtures
# ---------------------------------------------------------------------------

# happy_l1: declared token counts for exact accounting tests.
write_scenario(scenario("happy_l1", {
    "planner": [{"json": plan([builder_step("Troy", 0.5, 1000),
                               random_demand_step(1000),
                               runner_step(),
                               analyst_step("travel_time")],
                              "standard flow", "4 steps"),
                 "tokens_in": 812, "tokens_out": 96}],
    "builder": [{"json": build_env("Troy", 0.5, 1000), "tokens_in": 520, "tokens_out": 40}],
    "demand": [{"json": random_demand_env(1000), "tokens_in": 505, "tokens_out": 38}],
    "runner": [{"json": run_env(), "tokens_in": 480, "tokens_out": 22}],
    "analyst": [{"json": analyze_env("travel_time"), "tokens_in": 490, "tokens_out": 25}],
    "mono": [{"json": e, "tokens_in": 900, "tokens_out": 40}
             for e in mono_success("Troy", 0.5, 1000, random_demand_env(1000), 3600, "travel_time")],
}, token_model="declared"))

# envelope_retry: demand garbles its first completion, fixes it on the retry.
good = od_demand_env("Main Street", "Congress Street", 300)
write_scenario(scenario("envelope_retry", {
    "planner": [plan([builder_step("Troy", 0.5, 1000),
                      od_demand_step("Main Street", "Congress Street", 300),
                      runner_step(), analyst_step("travel_time")],
                     "od flow", "retry fixture")],
    "builder": [build_env("Troy", 0.5, 1000)],
    "demand": [{"text": "Here is the JSON:\n" + json.dumps(good)}, good],
    "runner": [run_env()],
    "analyst": [analyze_env("travel_time")],
}))

# plan_retry: first plan puts two prompts in one step; second is clean.
bad_plan = plan([builder_step("Troy", 0.5, 1000),
                 random_demand_step(500),
                 runner_step(), analyst_step("travel_time")],
                "broken", "two prompts in step 2")
bad_plan["plan"][1]["agent_prompts"]["builder"] = "also build"
good_plan = plan([builder_step("Troy", 0.5, 1000),
                  random_demand_step(500),
                  runner_step(), analyst_step("travel_time")],
                 "fixed", "one prompt per step")
write_scenario(scenario("plan_retry", {
    "planner": [bad_plan, good_plan],
    "builder": [build_env("Troy", 0.5, 1000)],
    "demand": [random_demand_env(500)],
    "runner": [run_env()],
    "analyst": [analyze_env("travel_time")],
}))

# plan_reject: the planner never recovers inside one iteration.
write_scenario(scenario("plan_reject", {
    "planner": [bad_plan, bad_plan, bad_plan, bad_plan],
    "builder": [build_env("Troy", 0.5, 1000)],
}))

# nowhere_road: demand references a street that never existed.
write_scenario(scenario("nowhere_road", {
    "planner": [plan([builder_step("Troy", 0.5, 1000),
                      od_demand_step("Main Street", "Nowhere Road", 800),
                      runner_step(), analyst_step("travel_time")],
                     "od flow", "bad street fixture")],
    "builder": [build_env("Troy", 0.5, 1000)],
    "demand": [od_demand_env("Main Street", "Nowhere Road", 800)],
    "runner": [run_env()],
    "analyst": [analyze_env("travel_time")],
}))

# demand_gated: plan that skips the builder; the demand step must be gated
# before any backend call happens.
write_scenario(scenario("demand_gated", {
    "planner": [plan([random_demand_step(100)], "degenerate", "no builder")],
    "demand": [random_demand_env(100)],
}))


# ---------------------------------------------------------------------------
# suite file
# ---------------------------------------------------------------------------

SUITE_DIR.mkdir(parents=True, exist_ok=True)
with open(SUITE_DIR / "bench30.json", "w") as f:
    json.dump({"suite": "bench30", "tasks": tasks}, f, indent=1)
    f.write("\n")

print(f"wrote {len(tasks)} tasks and {len(list(SCENARIO_DIR.glob('*.json')))} scenarios")
