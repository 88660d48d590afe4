import pytest

from ssisim.errors import ConfigError, UnknownAttribute
from ssisim.scenarios import (
    GOVERNMENT_ATTRIBUTES,
    GOVERNMENT_DEFAULT_VALUES,
    GovernmentConfig,
    HealthcareConfig,
    run_government_scenario,
    run_government_scenario_detailed,
    run_healthcare_scenario,
    run_healthcare_scenario_detailed,
)

FIG5_SEQUENCE = [
    ("patient", "request_credential"),
    ("issuer-authority", "anchor_schema_and_commitment"),
    ("issuer-authority", "issue_credential"),
    ("patient", "present_credential"),
    ("provider", "verify_presentation"),
    ("provider", "grant_access"),
]


class TestHealthcare:
    def test_honest_run_is_six_steps_and_accepts(self):
        run = run_healthcare_scenario_detailed(HealthcareConfig())
        transcript = run.transcript
        assert len(transcript.steps) == 6
        assert [s["step"] for s in transcript.steps] == [1, 2, 3, 4, 5, 6]
        assert transcript.final_verdict == "accept"
        assert transcript.steps[-1]["outcome"] == "granted"
        # actors follow the six-step issue/present/verify choreography
        actor_by_role = {
            "patient": transcript.steps[0]["actor_did"],
            "issuer-authority": transcript.steps[1]["actor_did"],
            "provider": transcript.steps[4]["actor_did"],
        }
        observed = [(next(role for role, did in actor_by_role.items()
                          if did == s["actor_did"]), s["action"])
                    for s in transcript.steps]
        assert observed == FIG5_SEQUENCE

    def test_transcript_is_byte_stable_under_fixed_seed(self):
        a = run_healthcare_scenario(HealthcareConfig())
        b = run_healthcare_scenario(HealthcareConfig())
        assert a.to_bytes() == b.to_bytes()

    def test_different_seed_changes_the_transcript(self):
        a = run_healthcare_scenario(HealthcareConfig())
        b = run_healthcare_scenario(HealthcareConfig(seed=b"\x77" * 32))
        assert a.to_bytes() != b.to_bytes()

    def test_revocation_before_presentation_rejects_at_step_5(self):
        transcript = run_healthcare_scenario(
            HealthcareConfig(revoke_before_presentation=True))
        assert len(transcript.steps) == 6
        assert transcript.steps[4]["outcome"] == "reject:status_active"
        assert transcript.final_verdict == "reject:status_active"
        assert transcript.steps[-1]["outcome"] == "denied"

    def test_tampered_attribute_rejects_on_merkle_proofs(self):
        transcript = run_healthcare_scenario(HealthcareConfig(tamper_attribute="dob"))
        assert transcript.steps[4]["outcome"] == "reject:merkle_proofs"
        assert transcript.final_verdict == "reject:merkle_proofs"

    def test_tampering_an_unknown_attribute_is_a_config_error(self):
        with pytest.raises(ConfigError):
            run_healthcare_scenario(HealthcareConfig(tamper_attribute="blood_type"))


class TestGovernment:
    def test_default_run_reveals_exactly_name_and_birthdate(self):
        run = run_government_scenario_detailed(GovernmentConfig())
        assert run.transcript.final_verdict == "accept"
        assert {r.name for r in run.presentation.revealed} == {"name", "date_of_birth"}

    def test_hidden_attributes_never_reach_the_verifier_or_the_ledger(self):
        run = run_government_scenario_detailed(GovernmentConfig())
        hidden = {name: value for name, value in GOVERNMENT_DEFAULT_VALUES.items()
                  if name not in ("name", "date_of_birth")}
        surfaces = (
            run.transcript.to_bytes(),
            run.verifier_received_plaintext,
            run.ledger.to_bytes(),
        )
        for surface in surfaces:
            for value in hidden.values():
                assert value.encode() not in surface
        # the two agreed attributes do reach the verifier
        assert GOVERNMENT_DEFAULT_VALUES["name"].encode() in run.verifier_received_plaintext

    def test_reveal_all_disclosures_nine_attributes(self):
        run = run_government_scenario_detailed(GovernmentConfig(reveal=("all",)))
        assert run.transcript.final_verdict == "accept"
        assert len(run.presentation.revealed) == 9
        assert {r.name for r in run.presentation.revealed} == set(GOVERNMENT_ATTRIBUTES)

    def test_unknown_reveal_attribute_fails_at_presentation(self):
        with pytest.raises(UnknownAttribute):
            run_government_scenario(GovernmentConfig(reveal=("blood_type",)))

    def test_transcript_is_byte_stable(self):
        a = run_government_scenario(GovernmentConfig())
        b = run_government_scenario(GovernmentConfig())
        assert a.to_bytes() == b.to_bytes()
