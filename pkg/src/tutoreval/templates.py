"""Embedded evaluation prompts, one per track.

Each prompt opens with "TASK DEFINITION:" and an "EVALUATION CRITERIA:"
section mapping the three labels onto the track's rubric. The text is fixed;
instruction records must emit it byte-for-byte.
"""

MISTAKE_IDENTIFICATION_TEMPLATE = """\
TASK DEFINITION:

You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's response accurately identifies a mistake in the student's reasoning or solution.

EVALUATION CRITERIA:

1."Yes"– The tutor accurately identifies a mistake in the student’s response.
2."To some extent"– The tutor shows some awareness, but it is ambiguous or uncertain.
3."No"– The tutor fails to identify or misunderstands the mistake."""

MISTAKE_LOCATION_TEMPLATE = """\
TASK DEFINITION:

You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's response accurately points to a genuine mistake and its location in the student's response.

EVALUATION CRITERIA:

1."Yes"– The tutor clearly points to the exact location of the mistake.
2."To some extent"– The tutor refers to a mistake but is vague or indirect.
3."No"– The tutor provides no indication of where the mistake occurred."""

PROVIDING_GUIDANCE_TEMPLATE = """\
TASK DEFINITION:

You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's response provides correct and relevant guidance to help the student.

EVALUATION CRITERIA:

1."Yes"– The tutor gives helpful guidance such as a hint or explanation.
2."To some extent"– The guidance is partially helpful, unclear, or incomplete.
3."No"– The guidance is absent, irrelevant, or factually incorrect."""

ACTIONABILITY_TEMPLATE = """\
TASK DEFINITION:

You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's feedback is actionable, i.e., it clearly suggests what the student should do next.

EVALUATION CRITERIA:

1."Yes"– The response includes clear next steps for the student.
2."To some extent"– Some action is implied, but it is not clearly stated.
3."No"– No action is suggested or the feedback ends the conversation."""
