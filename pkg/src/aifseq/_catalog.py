"""Canonical Action-Intent Framework catalog.

The AIF is a two-tier taxonomy of adversarial action intents: 11 macro states
describing what an attacker achieved, each with one or more micro states
describing how. Keys are normalized snake_case; where normalization changed
the original catalog spelling (typo fixes, punctuation, disambiguation of the
zero-day micros that reuse macro names), the original spelling is kept in
``original_name``.

The dict below is in taxonomy-document shape and is validated through the
same loader as user-supplied documents (see :mod:`aifseq.taxonomy`).
"""

CATALOG_VERSION = "aif-1.0.0"

_MACROS = [
    {
        "key": "passive_recon",
        "display_name": "Passive Recon",
        "description": (
            "An attempt to gain information about targeted computers and "
            "networks without actively engaging with the systems"
        ),
    },
    {
        "key": "active_recon",
        "display_name": "Active Recon",
        "description": (
            "An intruder engages with the targeted system to gather "
            "information about vulnerabilities"
        ),
    },
    {
        "key": "privilege_escalation",
        "display_name": "Privilege Escalation",
        "original_name": "Privilege Escalation.",
        "description": (
            "Act of exploiting a bug, design flaw or configuration oversight "
            "in an operating system or software application to gain elevated "
            "access"
        ),
    },
    {
        "key": "targeted_exploits",
        "display_name": "Targeted Exploits",
        "description": (
            "Exploits targeting a specific service, application, "
            "organizational entity, or person"
        ),
    },
    {
        "key": "ensure_access",
        "display_name": "Ensure Access",
        "description": (
            "Actions which expand preexisting access or circumvent active "
            "defense strategies"
        ),
    },
    {
        "key": "zero_day",
        "display_name": "Zero Day",
        "description": (
            "Actions performed employing undocumented vulnerabilities or "
            "strategies with unknown consequences where no patch exists at "
            "the time of the attack"
        ),
    },
    {
        "key": "disrupt",
        "display_name": "Disrupt",
        "description": "Disruption in services, usually from a Denial of Service.",
    },
    {
        "key": "destroy",
        "display_name": "Destroy",
        "description": (
            "Destruction of information, usually when an attack has caused a "
            "deletion of files or removal of access."
        ),
    },
    {
        "key": "distort",
        "display_name": "Distort",
        "description": (
            "Distortion in information, usually when an attack has caused a "
            "modification of a file."
        ),
    },
    {
        "key": "disclosure",
        "display_name": "Disclosure",
        "description": (
            "Disclosure of information, usually providing an attacker with a "
            "view of information they would normally not have access to"
        ),
    },
    {
        "key": "delivery",
        "display_name": "Delivery",
        "description": (
            "Actions where the intent is to place/install/deliver data that "
            "could be in the form of malware, backdoor, application, etc."
        ),
    },
]

_MICROS = [
    # Passive Recon
    {
        "key": "target_identification",
        "display_name": "Target Identification",
        "parent": "passive_recon",
        "description": "Determining the organizational/network target",
    },
    {
        "key": "surfing",
        "display_name": "Surfing",
        "parent": "passive_recon",
        "description": (
            "Using legitimate methods (websites, public documents, etc) to "
            "obtain information about the target"
        ),
    },
    {
        "key": "social_engineering",
        "display_name": "Social Engineering",
        "parent": "passive_recon",
        "description": (
            "Non-technical strategy cyber attackers use that relies heavily "
            "on human interaction and often involves tricking people into "
            "breaking standard security practices"
        ),
    },
    # Active Recon
    {
        "key": "host_discovery",
        "display_name": "Host Discovery",
        "parent": "active_recon",
        "description": (
            "Use of technical programs to uncover the location/IP of "
            "machines in the target network"
        ),
    },
    {
        "key": "service_discovery",
        "display_name": "Service Discovery",
        "parent": "active_recon",
        "description": (
            "Use of technical programs to uncover the services or "
            "applications employed on a machine"
        ),
    },
    {
        "key": "vulnerability_discovery",
        "display_name": "Vulnerability Discovery",
        "parent": "active_recon",
        "description": (
            "Techniques or programs to uncover vulnerabilities on machine "
            "with a specific application or OS"
        ),
    },
    {
        "key": "information_discovery",
        "display_name": "Information Discovery",
        "parent": "active_recon",
        "description": (
            "Actions which reveal technical information such as system "
            "configurations, file system contents, or information about the "
            "target/entity"
        ),
    },
    # Privilege Escalation
    {
        "key": "user_privilege_escalation",
        "display_name": "User Privilege Escalation",
        "original_name": "User Privledge Esc.",
        "parent": "privilege_escalation",
        "description": "Action which results in the adversary gaining user privileges",
    },
    {
        "key": "root_privilege_escalation",
        "display_name": "Root Privilege Escalation",
        "original_name": "Root Privledge Esc.",
        "parent": "privilege_escalation",
        "description": "Action which results in the adversary gaining root/admin privileges",
    },
    {
        "key": "network_sniffing_credential_access",
        "display_name": "Network Sniffing Credential Access",
        "parent": "privilege_escalation",
        "description": (
            "Using the network interface on a system to monitor or capture "
            "information sent over a wired or wireless connection"
        ),
    },
    {
        "key": "brute_force_credential_access",
        "display_name": "Brute Force Credential Access",
        "parent": "privilege_escalation",
        "description": (
            "Brute force techniques to attempt access to accounts when "
            "passwords are unknown or when password hashes are obtained"
        ),
    },
    {
        "key": "account_manipulation",
        "display_name": "Account Manipulation",
        "parent": "privilege_escalation",
        "description": (
            "Modifying permissions, modifying credentials, adding or "
            "changing permission groups, modifying account settings, or "
            "modifying how authentication is performed"
        ),
    },
    # Targeted Exploits
    {
        "key": "trusted_organization_exploitation",
        "display_name": "Trusted Organization Exploitation",
        "original_name": "Trusted Orginization Exploitation",
        "parent": "targeted_exploits",
        "description": (
            "Access through trusted third party relationship exploits an "
            "existing connection that may not be protected or receives less "
            "scrutiny than standard mechanisms of gaining access to a network"
        ),
    },
    {
        "key": "exploit_public_facing_application",
        "display_name": "Exploit Public Facing Application",
        "parent": "targeted_exploits",
        "description": (
            "Use of software, data, or commands to take advantage of a "
            "weakness in an Internet-facing computer system or program in "
            "order to cause unintended or unanticipated behavior"
        ),
    },
    {
        "key": "exploit_remote_services",
        "display_name": "Exploit Remote Services",
        "parent": "targeted_exploits",
        "description": (
            "Exploitation of remote services such as VPNs, Citrix, and other "
            "access mechanisms allow users to connect to internal enterprise "
            "network resources from external locations"
        ),
    },
    {
        "key": "spearphishing",
        "display_name": "Spearphishing",
        "parent": "targeted_exploits",
        "description": (
            "An email spoofing attack that targets a specific organization "
            "or individual, seeking unauthorized access to sensitive "
            "information"
        ),
    },
    {
        "key": "service_specific_exploitation",
        "display_name": "Service-Specific Exploitation",
        "parent": "targeted_exploits",
        "description": (
            "Use of a exploit/vulnerability specific to a system OS, "
            "application, and version"
        ),
    },
    {
        "key": "arbitrary_code_execution",
        "display_name": "Arbitrary Code Execution",
        "parent": "targeted_exploits",
        "description": (
            "control over an target by establishing a communication channel "
            "between adversary and target"
        ),
    },
    # Ensure Access
    {
        "key": "defense_evasion",
        "display_name": "Defense Evasion",
        "parent": "ensure_access",
        "description": (
            "Techniques an adversary may use to evade detection or avoid "
            "other defenses"
        ),
    },
    {
        "key": "command_and_control",
        "display_name": "Command & Control",
        "parent": "ensure_access",
        "description": (
            "Control over an target by establishing a communication channel "
            "between adversary and target"
        ),
    },
    {
        "key": "lateral_movement",
        "display_name": "Lateral Movement",
        "parent": "ensure_access",
        "description": (
            "Techniques that enable an adversary to access and control "
            "remote systems on a network and could, but does not "
            "necessarily, include execution of tools on remote systems"
        ),
    },
    # Zero Day (micro names reuse macro names in the original catalog; keys
    # are prefixed to keep them unique across the framework)
    {
        "key": "zero_day_privilege_escalation",
        "display_name": "Zero Day Privilege Escalation",
        "original_name": "Privledge Esc.",
        "parent": "zero_day",
        "description": "Undocumented action that raises the privilege level of the adversary",
    },
    {
        "key": "zero_day_targeted_exploit",
        "display_name": "Zero Day Targeted Exploit",
        "original_name": "Targeted Exploit",
        "parent": "zero_day",
        "description": "Usage of a unpatched and possibly undocumented targeted exploit",
    },
    {
        "key": "zero_day_ensure_access",
        "display_name": "Zero Day Ensure Access",
        "original_name": "Ensure Access",
        "parent": "zero_day",
        "description": "Unknown method to evade detection or controlling method",
    },
    # Disrupt
    {
        "key": "end_point_dos",
        "display_name": "End Point DoS",
        "parent": "disrupt",
        "description": (
            "Exhausting the system resources those services are hosted on or "
            "exploiting the system to cause a persistent crash condition"
        ),
    },
    {
        "key": "network_dos",
        "display_name": "Network DoS",
        "parent": "disrupt",
        "description": "Exhaust the network bandwidth services rely on",
    },
    {
        "key": "service_stop",
        "display_name": "Service Stop",
        "parent": "disrupt",
        "description": (
            "Stop or disable services on a system to render those services "
            "unavailable to legitimate users"
        ),
    },
    {
        "key": "resource_hijacking",
        "display_name": "Resource Hijacking",
        "parent": "disrupt",
        "description": (
            "Leverage the resources of co-opted systems in order to solve "
            "resource intensive problems which may impact system and/or "
            "hosted service availability"
        ),
    },
    # Destroy
    {
        "key": "data_destruction",
        "display_name": "Data Destruction",
        "parent": "destroy",
        "description": (
            "Destroy data and files on specific systems or in large numbers "
            "on a network to interrupt availability to systems, services, "
            "and network resources"
        ),
    },
    {
        "key": "content_wipe",
        "display_name": "Content Wipe",
        "parent": "destroy",
        "description": (
            "Erase the contents of storage devices on specific systems as "
            "well as large numbers of systems in a network to interrupt "
            "availability to system and network resources"
        ),
    },
    # Distort
    {
        "key": "data_encryption",
        "display_name": "Data Encryption",
        "parent": "distort",
        "description": (
            "Encrypt data on target systems or on large numbers of systems "
            "in a network to interrupt availability to system and network "
            "resources"
        ),
    },
    {
        "key": "defacement",
        "display_name": "Defacement",
        "parent": "distort",
        "description": (
            "Modify visual content available internally or externally to an "
            "enterprise network."
        ),
    },
    {
        "key": "data_manipulation",
        "display_name": "Data Manipulation",
        "parent": "distort",
        "description": (
            "Insert, delete, or manipulate data at rest in order to "
            "manipulate external outcomes or hide activity."
        ),
    },
    # Disclosure
    {
        "key": "data_exfiltration",
        "display_name": "Data Exfiltration",
        "parent": "disclosure",
        "description": (
            "Techniques and attributes that result or aid in the adversary "
            "removing files and information from a target network"
        ),
    },
    # Delivery
    {
        "key": "data_delivery",
        "display_name": "Data Delivery",
        "parent": "delivery",
        "description": (
            "Intent to place/install/deliver data that could be in the form "
            "of malware, backdoor, application, etc."
        ),
    },
]

CATALOG_DOCUMENT = {
    "version": CATALOG_VERSION,
    "macros": _MACROS,
    "micros": _MICROS,
}
