#pragma once

#include "contractor/util.hpp"
#include "contractor/violation.hpp"
#include "contractor/task.hpp"
#include "contractor/contract.hpp"
#include "contractor/kernel.hpp"
#include "contractor/workspace.hpp"
#include "contractor/patch_merge.hpp"
#include "contractor/api_edit.hpp"
#include "contractor/agent.hpp"
#include "contractor/auditor.hpp"
#include "contractor/scheduler.hpp"
#include "contractor/eval.hpp"
