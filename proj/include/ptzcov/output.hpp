#pragma once

#include <string>

#include "json.hpp"

#include "ptzcov/runner.hpp"

namespace ptzcov::sim {

/// Region as {"polygons": [{"outer": [[x, y], ...], "holes": [[[x, y], ...], ...]}, ...]}.
nlohmann::json region_to_json(const geom2d::Region& r);

/// {"step", "cells": [region...], "common": [{"quality", "agents", "region"}...], "neutral": region}.
nlohmann::json partition_to_json(const Partition& p, int step);

nlohmann::json summary_json(const RunLog& log);

std::string trajectories_csv(const RunLog& log);
std::string objective_csv(const RunLog& log);

/// Writes trajectories.csv, objective.csv, partition_<step>.json and summary.json into
/// dir, creating it if needed. Throws Error on I/O failure.
void emit_outputs(const RunLog& log, const std::string& dir);

}  // namespace ptzcov::sim
