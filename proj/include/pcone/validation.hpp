#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pcone {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0 when no runtime bound applies
    std::vector<std::string> details;
};

int acceptance_criteria_count();

CriterionResult run_criterion(int id);

// runs every criterion in order; on_done is called after each one
std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_done = {});

std::string summary_line(const CriterionResult& r);

}  // namespace pcone
