# Copyright 2024 The SteerNeedle Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Multi-threaded search with shared OPEN and CLOSED sets."""

import threading
import time
from typing import Optional

import numpy as np
from absl import logging

from steerneedle.environment.scenario import ProblemInstance
from steerneedle.planner import search
from steerneedle.planner.config import PlannerConfig
from steerneedle.planner.result import PlanResult, PlanStatus, Trajectory
from steerneedle.planner.search import RejectReason, SearchNode, Validation

# Idle workers re-check the stop conditions at least this often (s).
_WAIT_SECONDS = 0.05


class ParallelSearch(search.MultiResolutionSearch):
    """Workers pop nodes from the shared queue and validate them concurrently.

    OPEN, CLOSED, node bookkeeping and statistics are only touched while holding
    `_cond`. Collision checks and direct goal connections run outside it. The
    similar-node check and the CLOSED insertion form one critical section, and the
    first committed solution stops every worker.
    """

    def __init__(self, problem: ProblemInstance, cfg: PlannerConfig) -> None:
        super().__init__(problem, cfg)
        self._cond = threading.Condition()
        self._active = 0
        self._stop = False
        self._timed_out = False
        self._error: Optional[BaseException] = None

    def _commit(self, trajectory: Trajectory) -> None:
        with self._cond:
            if self._stop:
                return
            if self.record(trajectory):
                self._stop = True
                self._cond.notify_all()

    def _process_concurrent(self, node: SearchNode) -> None:
        problem, cfg = self.problem, self.cfg
        verdict = search.check_bounds(node, problem, cfg)
        if verdict.accepted:
            with self._cond:
                duplicate = self.closed.contains_duplicate(node.pose)
            if duplicate:
                verdict = Validation(False, RejectReason.DUPLICATE)
            else:
                verdict = search.check_collision(node, problem, cfg)

        accepted = False
        reached = None
        with self._cond:
            if verdict.accepted:
                if self.closed.contains_duplicate(node.pose):
                    verdict = Validation(False, RejectReason.DUPLICATE)
                elif cfg.variant.rejects_similar and search.exists_similar(
                    node.pose, self.closed, cfg.d_sim, cfg.alpha
                ):
                    verdict = Validation(False, RejectReason.SIMILAR)
            if self._stop:
                return
            if verdict.accepted:
                accepted = True
                self.closed.add(node.pose)
                self.stats.nodes_expanded += 1
                gap = np.linalg.norm(node.pose.position - problem.goal)
                if gap <= problem.tau:
                    reached = search.retrieve_plan(node, problem.goal)
                self.expand(node)
            else:
                self.count_rejection(verdict.reason)
            self.refine(node)
            self._cond.notify_all()

        if reached is not None:
            self._commit(reached)
        elif accepted and cfg.variant.optimized:
            arc = self.direct_arc(node)
            if arc is not None:
                self._commit(search.retrieve_plan(node, problem.goal, arc))

    def _next_node(self, deadline: float) -> Optional[SearchNode]:
        with self._cond:
            while not len(self.open) and self._active > 0 and not self._stop:
                self._cond.wait(_WAIT_SECONDS)
            if self._stop or not len(self.open):
                return None
            if self.budget_exhausted(deadline):
                self._timed_out = True
                self._stop = True
                self._cond.notify_all()
                return None
            self.stats.nodes_extracted += 1
            self._active += 1
            return self.open.pop()

    def _worker(self, deadline: float) -> None:
        while True:
            node = self._next_node(deadline)
            if node is None:
                return
            try:
                self._process_concurrent(node)
            except BaseException as e:  # Surfaced by run() after the join.
                with self._cond:
                    self._error = e
                    self._stop = True
                return
            finally:
                with self._cond:
                    self._active -= 1
                    self._cond.notify_all()

    def run(self) -> PlanResult:
        self._start_time = time.perf_counter()
        deadline = self._start_time + self.cfg.time_budget
        logging.info(
            "Planning with %s on %d threads (budget %.1fs).",
            self.name,
            self.cfg.thread_count,
            self.cfg.time_budget,
        )
        self.open.push(SearchNode(self.problem.start))
        workers = [
            threading.Thread(
                target=self._worker, args=(deadline,), name=f"rcs-worker-{i}"
            )
            for i in range(self.cfg.thread_count)
        ]
        for worker in workers:
            worker.start()
        for worker in workers:
            worker.join()
        if self._error is not None:
            raise self._error
        status = PlanStatus.TIMED_OUT if self._timed_out else PlanStatus.EXHAUSTED
        return self.finish(status)


def plan_parallel(problem: ProblemInstance, cfg: PlannerConfig) -> PlanResult:
    """Runs the search on `cfg.thread_count` workers.

    A single thread runs the serial engine and returns exactly its result.
    """
    if cfg.thread_count == 1:
        return search.plan_serial(problem, cfg)
    return ParallelSearch(problem, cfg).run()
