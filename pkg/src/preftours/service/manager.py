"""In-memory live sessions with background query computation.

Tour planning for the next query can take a little while, so choices flip the
session into a ``computing`` status and a worker thread fills in the next query.
Choices are applied under a per-session lock: of two conflicting posts exactly one
wins, and repeating an already-applied choice is a harmless no-op.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..gtop import TourSet
from ..polyhedron import Cut
from ..querygen import QueryProposal
from ..rewards import DEFAULT_DECAYS, DecaySet, features
from ..scenario import Environment
from ..session import LoopConfig, SessionState, apply_choice, init_session, propose_query
from ..users import QueryOutcome

AWAITING = "awaiting_choice"
COMPUTING = "computing"
FINISHED = "finished"


class SessionNotFound(KeyError):
    pass


class WrongStatus(RuntimeError):
    def __init__(self, message: str, status: str):
        super().__init__(message)
        self.status = status


class ChoiceConflict(RuntimeError):
    pass


@dataclass
class LiveSession:
    id: str
    env: Environment
    config: LoopConfig
    decays: DecaySet
    state: SessionState
    status: str = COMPUTING
    pending: Optional[QueryProposal] = None
    last_applied: Optional[tuple[int, int]] = None
    error: Optional[str] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _human_outcome(
    env: Environment,
    current: TourSet,
    proposal: QueryProposal,
    chosen: int,
    decays: DecaySet,
) -> QueryOutcome:
    phi1 = features(current, env, decays)
    phi2 = features(proposal.tours, env, decays)
    diff = phi2 - phi1
    informative = bool(np.max(np.abs(diff)) > 1e-9)
    cut = None
    if informative:
        direction = (phi1 - phi2) if chosen == 1 else diff
        cut = Cut(direction, chosen=chosen)
    return QueryOutcome(chosen=chosen, cut=cut, prob_chosen=None, informative=informative)


class SessionManager:
    """Owns all live sessions and the worker pool computing their queries."""

    def __init__(self, max_workers: int = 2):
        self._sessions: dict[str, LiveSession] = {}
        self._executor = ThreadPoolExecutor(max_workers=max_workers)

    def shutdown(self) -> None:
        self._executor.shutdown(wait=False, cancel_futures=True)

    def get(self, session_id: str) -> LiveSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionNotFound(session_id)

    def create(self, env: Environment, config: LoopConfig,
               decays: DecaySet = DEFAULT_DECAYS) -> LiveSession:
        config.validate()
        state = init_session(env, config, decays)
        session = LiveSession(
            id=uuid.uuid4().hex[:12],
            env=env,
            config=config,
            decays=decays,
            state=state,
        )
        self._sessions[session.id] = session
        if state.terminated:
            session.status = FINISHED
        else:
            session.status = COMPUTING
            self._executor.submit(self._compute_next, session)
        return session

    def _compute_next(self, session: LiveSession) -> None:
        try:
            proposal = propose_query(session.state, session.env, session.config,
                                     session.decays)
        except Exception as exc:  # surfaced via /status rather than a dead thread
            with session.lock:
                session.error = str(exc)
                session.status = FINISHED
            return
        with session.lock:
            if proposal is None:
                session.status = FINISHED
            else:
                session.pending = proposal
                session.status = AWAITING

    def choose(self, session_id: str, chosen: int,
               iteration: Optional[int] = None) -> LiveSession:
        session = self.get(session_id)
        if chosen not in (1, 2):
            raise ValueError("chosen must be 1 or 2")
        with session.lock:
            # an exact replay (same iteration token, same pick) is a no-op;
            # a fresh choice while computing or after finish is a real error
            repeat = (
                session.last_applied is not None
                and iteration is not None
                and iteration == session.last_applied[0]
            )
            if repeat and chosen != session.last_applied[1]:
                raise ChoiceConflict(
                    f"iteration {iteration} was already answered with "
                    f"option {session.last_applied[1]}"
                )
            if session.status in (COMPUTING, FINISHED):
                if repeat:
                    return session
                raise WrongStatus(
                    f"session is {session.status}, not awaiting a choice",
                    session.status,
                )
            pending_k = session.state.iteration + 1
            if iteration is not None and iteration != pending_k:
                if repeat:
                    return session
                raise ChoiceConflict(
                    f"choice targets iteration {iteration} but iteration "
                    f"{pending_k} is pending"
                )
            proposal = session.pending
            assert proposal is not None
            outcome = _human_outcome(session.env, session.state.t_curr, proposal,
                                     chosen, session.decays)
            apply_choice(session.state, session.env, session.config, proposal,
                         outcome, session.decays)
            session.last_applied = (pending_k, chosen)
            session.pending = None
            if session.state.terminated:
                session.status = FINISHED
            else:
                session.status = COMPUTING
                self._executor.submit(self._compute_next, session)
            return session
